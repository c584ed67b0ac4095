"""=== Trace archive ================================================================================================
Persists a run: one summary row plus every instruction event, so traces of different runs can be queried later.
==================================================================================================================="""

import logging
from imp_messages.msg import TraceEvent
from imp_runtime.spikes import compute_sparsity
from sql_access import sql_interface as sqli
from sql_bases.sqlbase_trace.sqlbase_trace import Base, InstructionEventRecord, RunRecord

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -


def open_archive(db_path: str, style: str = "SQLite"):
    return sqli.createSession(db_path, tables=[RunRecord.__table__, InstructionEventRecord.__table__], style=style,
                              base=Base)


def archive_run(db_path: str, label: str, result, report, n_macros: int, style: str = "SQLite") -> str:
    """=== Function name: archive_run =================================================================================
    :param result: InferenceResult of the run
    :param report: CostReport of the run's trace
    :return: run_id of the new summary row
    ==================================================================================================================="""
    session = open_archive(db_path, style)
    try:
        summary = {"label": label,
                   "timesteps": result.spikes.timesteps,
                   "n_layers": len(result.final_v),
                   "n_macros": n_macros,
                   "instructions": len(result.trace),
                   "overflow_events": result.stats.overflow_events,
                   "energy_pj": report.energy_pj,
                   "delay_ns": report.delay_ns,
                   "edp": report.edp,
                   "sparsity": compute_sparsity(result.stats).overall}
        run_id = sqli.ADD_rows_to_table("run_id", [summary], RunRecord, session)[0]
        events = [dict(event.as_dict(), run_id=run_id, seq=seq) for seq, event in enumerate(result.trace)]
        sqli.ADD_rows_bulk(events, InstructionEventRecord, session)
        lg.info("archived  : run {} ({} events) to {}".format(run_id, len(events), db_path))
        return run_id
    finally:
        session.close()


def load_run_events(db_path: str, run_id: str, style: str = "SQLite") -> list:
    """Archived events of one run, in issue order, as dicts."""
    session = open_archive(db_path, style)
    try:
        return sqli.QUERY_rows_by_column_filtervalue_list_ordered("run_id", [run_id], "seq", InstructionEventRecord,
                                                                  session)
    finally:
        session.close()


def load_run_trace(db_path: str, run_id: str, style: str = "SQLite") -> list:
    """Archived events of one run rebuilt as TraceEvent-s, e.g. to re-cost an old run with another energy table."""
    return [TraceEvent.init_by_dict(**row) for row in load_run_events(db_path, run_id, style)]


def load_runs(db_path: str, style: str = "SQLite") -> list:
    session = open_archive(db_path, style)
    try:
        return sqli.QUERY_entire_table(session, RunRecord, ordered_by="timestamp")
    finally:
        session.close()
