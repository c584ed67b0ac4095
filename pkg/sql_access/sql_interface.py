"""
SQLAlchemy access to the trace archive.
A session can point at a SQLite file (default) or at a PostgreSQL URL; the row helpers work the same on both and
always hand rows back as plain dicts, never as mapped objects bound to a session.
"""

import logging
import inspect
from typing import Optional
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker, Session
from sqlalchemy.pool import NullPool

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -

DIALECTS = ("SQLite", "PostgreSQL")

# SESSION creation                                                                          -   START   -


def createSession(db_fullname: str, tables: Optional[list] = None, style: str = "SQLite", base=None) -> Session:
    """=== Function name: createSession ================================================================================
    Opens a session on the archive, creating the given tables if they are missing.
    :param db_fullname: str - SQLite file path, or full database URL for PostgreSQL
    :param tables: list - __table__ objects of the record classes; all of base's tables if None
    :param style: str - one of DIALECTS
    :param base: declarative base the record classes are declared on
    :return: an open Session - closing it is up to the caller
    ==================================================================================================================="""
    cfn = inspect.currentframe().f_code.co_name  # current function name
    if style not in DIALECTS:
        lg.critical("not found : '{}' is not a valid <style> value! - says {}()".format(style, cfn))
        raise ValueError("no valid dialect defined: {}".format(style))
    url = "sqlite:///{}".format(db_fullname) if style == "SQLite" else db_fullname
    engine = create_engine(url, echo=False, poolclass=NullPool)
    if base is not None:
        base.metadata.create_all(bind=engine, tables=tables)
    lg.debug("session   : {} archive at {} - says {}()".format(style, db_fullname, cfn))
    return sessionmaker(bind=engine)()

# SESSION creation                                                                          -   ENDED   -


def _row_dict(row, row_obj) -> dict:
    return {column.name: getattr(row, column.name) for column in row_obj.__table__.columns}

# ROW helpers                                                                               -   START   -


def ADD_rows_to_table(primary_key: str,
                      data_list: list,
                      row_obj,
                      session: Session) -> list:
    """=== Function name: ADD_rows_to_table ============================================================================
    Inserts one record per dict of <data_list>; a record whose primary key is already stored is skipped.
    The session stays open.
    :param primary_key: str - name of the primary key column of row_obj
    :param data_list: list[dict] - constructor arguments of row_obj.construct
    :param row_obj: record class
    :return: list of the primary keys inserted
    ==================================================================================================================="""
    inserted = []
    column = getattr(row_obj, primary_key)
    for data in data_list:
        record = row_obj.construct(d_in=data)
        key = getattr(record, primary_key)
        if session.query(row_obj).filter(column == key).count():
            lg.warning("skipped   : {} {} already archived".format(row_obj.__tablename__, key))
            continue
        session.add(record)
        inserted.append(key)
    session.commit()
    return inserted


def ADD_rows_bulk(data_list: list,
                  row_obj,
                  session: Session) -> int:
    """Inserts all records without the per-row key lookup; meant for rows whose keys are new by construction, like the
    events of a run just archived. Returns the number of rows."""
    session.add_all([row_obj.construct(d_in=data) for data in data_list])
    session.commit()
    return len(data_list)


def QUERY_entire_table(session: Session,
                       row_obj,
                       ordered_by: Optional[str] = None) -> list:
    """All rows of row_obj's table as dicts, optionally ordered by one column."""
    query = session.query(row_obj)
    if ordered_by:
        query = query.order_by(getattr(row_obj, ordered_by))
    return [_row_dict(row, row_obj) for row in query.all()]


def QUERY_rows_by_column_filtervalue_list_ordered(filterkey: str,
                                                  filtervalue_list: list,
                                                  ordered_by: Optional[str],
                                                  row_obj,
                                                  session: Session) -> list:
    """=== Function name: QUERY_rows_by_column_filtervalue_list_ordered ================================================
    Rows whose <filterkey> column takes any value of <filtervalue_list>, as dicts.
    :param ordered_by: str - column to sort by, table order if None
    ==================================================================================================================="""
    query = session.query(row_obj).filter(getattr(row_obj, filterkey).in_(list(filtervalue_list)))
    if ordered_by:
        query = query.order_by(getattr(row_obj, ordered_by))
    return [_row_dict(row, row_obj) for row in query.all()]

# ROW helpers                                                                               -   ENDED   -
