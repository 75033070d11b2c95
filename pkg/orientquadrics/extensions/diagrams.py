"""
    orientquadrics.extensions.diagrams
    ----------------------------------

    Graphviz rendering of factor graphs. Variables are drawn as circles, factors as small filled
    squares coloured by their family.
"""

import logging
from os.path import splitext

try:
    import graphviz as gv
except ImportError:  # pragma: no cover
    gv = None

from ..factors import Orientation

_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())


class FactorGraphDiagram(object):
    """ Graph creation for ``orientquadrics.graph.FactorGraph``.
        Attributes:
            graph (FactorGraph): The rendered problem.
            show_labels (bool): Print the semantic label below each landmark.
    """

    graph_attributes = {
        'rankdir': 'LR',
        'splines': 'true',
        'nodesep': '0.3',
    }

    style_attributes = {
        'variable': {
            'pose': {'shape': 'circle', 'style': 'filled', 'fillcolor': 'white', 'fontsize': '10'},
            'quadric': {'shape': 'circle', 'style': 'filled', 'fillcolor': 'lightgrey', 'fontsize': '10'},
        },
        'factor': {
            'default': {'shape': 'square', 'style': 'filled', 'label': '', 'width': '0.15', 'height': '0.15'},
            'prior': {'fillcolor': 'black'},
            'odometry': {'fillcolor': 'blue'},
            'box': {'fillcolor': 'yellow'},
            'vertical': {'fillcolor': 'red'},
            'horizontal': {'fillcolor': 'orange'},
        },
        'edge': {
            'default': {'color': 'black', 'penwidth': '0.8'},
        },
    }

    def __init__(self, graph, show_labels=True):
        self.graph = graph
        self.show_labels = show_labels

    def _factor_style(self, factor):
        style = dict(self.style_attributes['factor']['default'])
        if factor.kind == 'orientation':
            family = 'vertical' if factor.target.kind is Orientation.VERTICAL else 'horizontal'
        else:
            family = factor.kind
        style.update(self.style_attributes['factor'][family])
        return style

    def _variable_label(self, key):
        lid = int(key[1:])
        if self.show_labels and key.startswith('q') and lid in self.graph.labels:
            return '%s\\n%s' % (key, self.graph.labels[lid][0])
        return key

    def generate(self, title=None):
        """ Generate a DOT graph with graphviz
        Args:
            title (str): Optional graph title.
        Returns:
            graphviz.Graph
        """
        if not gv:  # pragma: no cover
            raise Exception('Factor graph diagrams require graphviz')
        dot = gv.Graph(name=title or '', graph_attr=dict(self.graph_attributes),
                       edge_attr=self.style_attributes['edge']['default'])
        if title:
            dot.attr(label=title)
        for key in self.graph.keys():
            kind = 'pose' if key.startswith('x') else 'quadric'
            dot.node(key, label=self._variable_label(key), **self.style_attributes['variable'][kind])
        for idx, factor in enumerate(self.graph.factors()):
            name = 'f%d' % idx
            dot.node(name, **self._factor_style(factor))
            for key in factor.keys:
                dot.edge(name, key)
        _LOGGER.debug("Generated diagram with %d factors", len(self.graph))
        return dot

    def draw(self, filename, format=None, prog='dot', title=None):
        """ Renders the factor graph into a file.
        Args:
            filename (str): Output path; the extension selects the format unless ``format`` is given.
            format (str): Optional output format such as 'svg' or 'png'.
            prog (str): Graphviz layout engine.
        """
        dot = self.generate(title)
        dot.engine = prog
        filename, ext = splitext(filename)
        format = format if format is not None else ext[1:]
        return dot.render(filename, format=format if format else 'png', cleanup=True)

    def source(self, title=None):
        """ The DOT source text. """
        return self.generate(title).source
