import codecs
import sys
from setuptools import setup, find_packages

with open('orientquadrics/version.py') as f:
    exec(f.read())

with codecs.open('README.md', 'r', 'utf-8') as f:
    import re
    # cut the title and badges from the description
    regex = r"([\s\S]*)## Quickstart"
    readme = f.read()

    long_description = re.sub(regex, "## Quickstart", readme, 1)
    assert long_description[:13] == '## Quickstart'  # Description should start with a headline (## Quickstart)

if len(set(('test', 'easy_install')).intersection(sys.argv)) > 0:
    import setuptools

install_requires = ['six', 'numpy>=1.17', 'scipy>=1.4', 'matplotlib>=3.1']
tests_require = ['dill', 'graphviz', 'mock', 'pycodestyle']
extras_require = {'diagrams': ['graphviz']}

extra_setuptools_args = {}
if 'setuptools' in sys.modules:
    extras_require['test'] = ['pytest']
    tests_require.append('pytest')

setup(
    name="orientquadrics",
    version=__version__,
    description="Dual quadric object SLAM with semantic orientation factors.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=['tests', 'test_*']),
    package_data={'orientquadrics': ['data/*']},
    include_package_data=True,
    install_requires=install_requires,
    extras_require=extras_require,
    tests_require=tests_require,
    entry_points={'console_scripts': ['orientquadrics = orientquadrics.cli:main']},
    license='MIT',
    python_requires='>=3.6',
    classifiers=[
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.6',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Topic :: Scientific/Engineering',
    ],
    **extra_setuptools_args
)
