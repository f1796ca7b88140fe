"""
Model Repository - persistence of trained dictionary pairs

Layout: 8-byte magic b"JDZSLMDL", uint8 format version, 3 padding bytes,
uint32 length of a UTF-8 JSON header (shapes and hyper-parameters), the header,
then Dx and Dz as two raw matrix blocks (see matrix_file).
"""
import json
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Union

from domain.errors import DataValidationError
from domain.hyper_params import HyperParams
from domain.joint_dictionary import JointDictionary

from .matrix_file import HEADER, VALUE_DTYPE, decode_raw, encode_raw

MODEL_MAGIC = b"JDZSLMDL"
MODEL_VERSION = 1
PREAMBLE = struct.Struct("<8sB3xI")


@dataclass(frozen=True)
class StoredModel:
    dictionary: JointDictionary
    params: HyperParams
    version: int = MODEL_VERSION


class ModelRepository:
    """Saves and loads JointDictionary models"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def save(self, path: Union[str, Path], dictionary: JointDictionary, params: HyperParams) -> None:
        path = Path(path)
        header: Dict[str, Any] = {
            "p": dictionary.p,
            "q": dictionary.q,
            "r": dictionary.r,
            "hyper_params": params.to_dict(),
        }
        encoded = json.dumps(header, sort_keys=True).encode("utf-8")
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            f.write(PREAMBLE.pack(MODEL_MAGIC, MODEL_VERSION, len(encoded)))
            f.write(encoded)
            f.write(encode_raw(dictionary.dx))
            f.write(encode_raw(dictionary.dz))
        self.logger.info("Saved model (p=%d, q=%d, r=%d) to %s", dictionary.p, dictionary.q, dictionary.r, path)

    def load(self, path: Union[str, Path]) -> StoredModel:
        """
        Raises:
            DataValidationError: When the file is missing or not a model file
        """
        path = Path(path)
        if not path.exists():
            raise DataValidationError(f"Model file not found: {path}")
        payload = path.read_bytes()
        if len(payload) < PREAMBLE.size:
            raise DataValidationError(f"{path}: truncated model file")
        magic, version, header_length = PREAMBLE.unpack_from(payload)
        if magic != MODEL_MAGIC:
            raise DataValidationError(f"{path}: bad model magic {magic!r}")
        if version != MODEL_VERSION:
            raise DataValidationError(f"{path}: unsupported model version {version}")

        offset = PREAMBLE.size
        try:
            header = json.loads(payload[offset:offset + header_length].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise DataValidationError(f"{path}: corrupt model header") from e
        offset += header_length

        try:
            p, q, r = int(header["p"]), int(header["q"]), int(header["r"])
            params = HyperParams.from_dict(header["hyper_params"])
        except (KeyError, TypeError, ValueError) as e:
            raise DataValidationError(f"{path}: model header missing or bad field {e}") from e
        dx_size = HEADER.size + p * r * VALUE_DTYPE.itemsize
        dx = decode_raw(payload[offset:offset + dx_size], f"{path}:Dx")
        dz = decode_raw(payload[offset + dx_size:], f"{path}:Dz")
        self.logger.info("Loaded model (p=%d, q=%d, r=%d) from %s", p, q, r, path)
        return StoredModel(dictionary=JointDictionary(dx, dz), params=params, version=version)
