"""HTTP service wrapping the simulator and analysis toolkit."""
