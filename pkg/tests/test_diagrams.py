import os
import shutil
import tempfile
from unittest import TestCase, skipIf

from orientquadrics.extensions.diagrams import FactorGraphDiagram
from orientquadrics.graph import build_graph

from .utils import handmade_dataset

try:
    # Just to skip tests if graphviz not installed
    import graphviz as gv  # @UnresolvedImport
except ImportError:  # pragma: no cover
    gv = None


def parse_dot(source):
    nodes = {}
    edges = []
    for line in source.split('\n'):
        line = line.strip()
        if ' -- ' in line:
            src, dst = line.split(' -- ')
            edges.append((src.strip('"'), dst.split()[0].strip('"')))
        elif line and line[0] in 'xqf' and '[' in line:
            name, attr = line.split(None, 1)
            nodes[name.strip('"')] = attr
    return nodes, edges


@skipIf(gv is None, 'Factor graph diagram test requires graphviz.')
class TestDiagrams(TestCase):

    def setUp(self):
        self.graph = build_graph(handmade_dataset(n_poses=3, label='bottle', detected=(0, 1)))

    def test_diagram(self):
        nodes, edges = parse_dot(FactorGraphDiagram(self.graph).source(title='a test'))
        self.assertEqual(set(n for n in nodes if not n.startswith('f')), {'x0', 'x1', 'x2', 'q7'})
        self.assertEqual(len([n for n in nodes if n.startswith('f')]), len(self.graph))
        # one edge per factor key: prior 1, odometry 2x2, box 2x2, orientation 1
        self.assertEqual(len(edges), 10)

    def test_factor_colors(self):
        nodes, _ = parse_dot(FactorGraphDiagram(self.graph).source())
        colors = sorted(attr.split('fillcolor=')[1].split()[0].rstrip(']') for name, attr in nodes.items()
                        if name.startswith('f'))
        self.assertEqual(colors, ['black', 'blue', 'blue', 'red', 'yellow', 'yellow'])

    def test_horizontal_color(self):
        graph = build_graph(handmade_dataset(label='book'))
        source = FactorGraphDiagram(graph).source()
        self.assertIn('orange', source)
        self.assertNotIn('red', source)

    def test_labels(self):
        self.assertIn('bottle', FactorGraphDiagram(self.graph).source())
        self.assertNotIn('bottle', FactorGraphDiagram(self.graph, show_labels=False).source())

    @skipIf(shutil.which('dot') is None, 'Rendering requires the graphviz executables.')
    def test_draw(self):
        tmp = tempfile.mkdtemp()
        try:
            target = os.path.join(tmp, 'graph.svg')
            FactorGraphDiagram(self.graph).draw(target)
            self.assertTrue(os.path.exists(target))
        finally:
            shutil.rmtree(tmp)
