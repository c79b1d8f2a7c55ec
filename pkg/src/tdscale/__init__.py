"""Scale functions and directions of automorphisms over local fields, in exact arithmetic."""
