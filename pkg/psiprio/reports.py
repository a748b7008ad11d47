"""
PsiPRIO - Informes tabulares
Exporta DataFrames a NDJSON, CSV o Excel según la extensión y lee NDJSON para replay.
"""
import logging
from pathlib import Path
from typing import Union

import pandas as pd

logger = logging.getLogger(__name__)

NDJSON_SUFFIXES = (".ndjson", ".jsonl")


def write_report(df: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sufijo = path.suffix.lower()
    if sufijo in NDJSON_SUFFIXES:
        df.to_json(path, orient="records", lines=True, force_ascii=False)
    elif sufijo == ".csv":
        df.to_csv(path, index=False)
    elif sufijo == ".xlsx":
        df.to_excel(path, index=False, engine="openpyxl")
    else:
        raise ValueError(f"Formato de informe no soportado: {path.suffix or '(sin extensión)'}")
    logger.info(f"Informe escrito: {path} ({len(df)} filas)")
    return path


def read_report(path: Union[str, Path]) -> pd.DataFrame:
    path = Path(path)
    sufijo = path.suffix.lower()
    if sufijo in NDJSON_SUFFIXES:
        # dtype=False: los agentes y aserciones se quedan como texto
        return pd.read_json(path, orient="records", lines=True, dtype=False)
    if sufijo == ".csv":
        return pd.read_csv(path, dtype=str, keep_default_na=False)
    if sufijo == ".xlsx":
        return pd.read_excel(path, dtype=str, engine="openpyxl")
    raise ValueError(f"Formato de informe no soportado: {path.suffix or '(sin extensión)'}")


def records_frame(records) -> pd.DataFrame:
    """Registros anidados (LTS) a columnas planas action.kind, action.subject, ..."""
    return pd.json_normalize(list(records))
