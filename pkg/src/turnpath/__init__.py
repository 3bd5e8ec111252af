"""Planning planar polylines with a bounded number of bounded turns."""
