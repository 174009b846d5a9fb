from .parser import ModelDocument, parse, parse_document, parse_file
from .serializer import serialize, systems_equivalent
from .csv_fields import load_field_csv, load_kernel_csv

__all__ = [
    "ModelDocument",
    "parse",
    "parse_document",
    "parse_file",
    "serialize",
    "systems_equivalent",
    "load_field_csv",
    "load_kernel_csv",
]
