"""Exact counting and verification of subdivisions induced by colored convex
polyhedra."""
from .engine import census, check_bound, enumerate_arrangement_faces, vertex_bound, vertices_bruteforce
from .families import gen_extremal, interval_scene, product_scene, product_vertex_count, rotated_polygon_scene
from .scene import Halfspace, Scene, add_bounding_simplex, read_scene, write_scene

__version__ = "0.1.0"
