# noqa: D104, N999
