from concurrent.futures import Future, ProcessPoolExecutor


class DummyExecutor:
    """Runs submitted work inline; stands in for a process pool when workers <= 1."""

    def __init__(self, *args, **kwargs):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def submit(self, fn, *args, **kwargs):
        f = Future()
        try:
            f.set_result(fn(*args, **kwargs))
        except Exception as e:
            f.set_exception(e)
        return f


def make_executor(workers: int):
    return ProcessPoolExecutor(max_workers=workers) if workers > 1 else DummyExecutor()
