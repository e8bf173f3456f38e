from hypothesis import given
from hypothesis import strategies as st

from chartgen.model import BoundingBox
from chartgen.quadtree import Quadtree, build_quadtree

rects = st.tuples(
    st.floats(min_value=-50, max_value=950),
    st.floats(min_value=-50, max_value=950),
    st.floats(min_value=0, max_value=120),
    st.floats(min_value=0, max_value=120),
).map(lambda t: BoundingBox(*t))


def test_single_item_retrievable():
    tree = Quadtree(BoundingBox(0, 0, 100, 100))
    tree.insert(7, BoundingBox(10, 10, 5, 5))
    assert tree.query(BoundingBox(0, 0, 100, 100)) == [7]
    assert tree.query(BoundingBox(50, 50, 10, 10)) == []


def test_subdivision_only_over_capacity():
    tree = Quadtree(BoundingBox(0, 0, 100, 100), capacity=4, max_depth=4)
    for i in range(4):
        tree.insert(i, BoundingBox(i * 10, i * 10, 5, 5))
    assert tree._root.children is None
    tree.insert(4, BoundingBox(60, 60, 5, 5))
    assert tree._root.children is not None


def test_depth_limit_respected():
    # All rects identical: without the depth cap this would subdivide forever.
    tree = Quadtree(BoundingBox(0, 0, 100, 100), capacity=2, max_depth=3)
    for i in range(20):
        tree.insert(i, BoundingBox(10, 10, 1, 1))
    assert tree.query(BoundingBox(9, 9, 3, 3)) == list(range(20))


@given(st.lists(rects, max_size=60))
def test_every_item_retrievable_by_any_touching_region(bboxes):
    tree = build_quadtree(list(enumerate(bboxes)), bounds=BoundingBox(0, 0, 1000, 1000))
    for i, bbox in enumerate(bboxes):
        assert i in tree.query(bbox)
        # Probe with a degenerate region at the rect corner too.
        assert i in tree.query(BoundingBox(bbox.x, bbox.y, 0, 0))


@given(st.lists(rects, max_size=60), rects)
def test_query_matches_linear_scan(bboxes, region):
    tree = build_quadtree(list(enumerate(bboxes)), bounds=BoundingBox(0, 0, 1000, 1000))
    def touches(a, b):
        return a.x <= b.right and b.x <= a.right and a.y <= b.bottom and b.y <= a.bottom
    expected = sorted(i for i, b in enumerate(bboxes) if touches(b, region))
    assert tree.query(region) == expected
