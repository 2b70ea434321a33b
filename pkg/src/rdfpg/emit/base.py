class Emitter:
    """Single-consumer sink for property graph elements.

    ``begin`` receives the assembled graph (for headers and key schemas), then
    every node is passed to ``node`` before any relation reaches ``relation``.
    """

    def begin(self, graph):
        pass

    def node(self, node):
        raise NotImplementedError

    def relation(self, rel):
        raise NotImplementedError

    def end(self):
        pass


class CollectingEmitter(Emitter):
    """Keeps the emitted elements and their order; for tests and API use."""

    def __init__(self):
        self.events = []
        self.nodes = []
        self.relations = []

    def begin(self, graph):
        self.events.append("begin")

    def node(self, node):
        self.events.append("node")
        self.nodes.append(node)

    def relation(self, rel):
        self.events.append("relation")
        self.relations.append(rel)

    def end(self):
        self.events.append("end")
