"""Database operations module"""
import sqlite3
from pathlib import Path

import pandas as pd

import settings

REPORT_COLUMNS = ['k', 'mean_lambda', 'theorem1', 'classical', 'melas', 'polya', 'margin_ratio', 'asymptotic_ratio']


def ensure_db_exists(path=None):
    """Create database and tables if they don't exist"""
    db_path = Path(path or settings.DATABASE_PATH)
    db_path.parent.mkdir(parents=True, exist_ok=True)

    conn = sqlite3.connect(db_path)
    cursor = conn.cursor()

    # One row per (run, k)
    cursor.execute("""
    CREATE TABLE IF NOT EXISTS report_rows (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        run_hash TEXT NOT NULL,
        domain TEXT NOT NULL,
        l INTEGER NOT NULL,
        k INTEGER NOT NULL,
        mean_lambda REAL,
        theorem1 REAL,
        classical REAL,
        melas REAL,
        polya REAL,
        margin_ratio REAL,
        asymptotic_ratio REAL,
        created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
    )
    """)

    conn.commit()
    conn.close()
    return db_path


def save_report(rows, run_hash, domain, l, path=None):
    """Append report rows; rows already stored for the same run hash are replaced"""
    db_path = ensure_db_exists(path)
    df = rows[REPORT_COLUMNS].copy()
    df.insert(0, 'l', int(l))
    df.insert(0, 'domain', domain)
    df.insert(0, 'run_hash', run_hash)

    conn = sqlite3.connect(db_path)
    conn.execute("DELETE FROM report_rows WHERE run_hash = ?", (run_hash,))
    df.to_sql('report_rows', conn, if_exists='append', index=False)
    conn.commit()
    conn.close()
    return len(df)


def get_rows(run_hash=None, domain=None, l=None, path=None):
    """Get report rows with optional filters"""
    conn = sqlite3.connect(ensure_db_exists(path))

    query = "SELECT * FROM report_rows WHERE 1=1"
    params = []

    if run_hash:
        query += " AND run_hash = ?"
        params.append(run_hash)

    if domain:
        if isinstance(domain, list):
            placeholders = ','.join(['?' for _ in domain])
            query += f" AND domain IN ({placeholders})"
            params.extend(domain)
        else:
            query += " AND domain LIKE ?"
            params.append(f"%{domain}%")

    if l:
        query += " AND l = ?"
        params.append(int(l))

    query += " ORDER BY run_hash, k"
    df = pd.read_sql_query(query, conn, params=params)
    conn.close()
    return df
