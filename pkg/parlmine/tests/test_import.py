try:
    from .. import *  # noqa
    from .. import cleaning, cli, config, deviance, enrich, eventlog, ingest, metrics, stats, viz  # noqa
    _top_import_error = None
except Exception as e:
    _top_import_error = e


def test_import_parlmine():
    assert _top_import_error is None
