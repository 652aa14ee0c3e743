"""
Flat binary weights container.

Layout (little-endian), see docs/weights_format.md:
    b"MFFW" | u32 version | u32 tensor count
    per tensor: u16 name length | UTF-8 name | u8 ndim | u32 × ndim dims
    then every tensor's float32 data, in header order
"""
import struct
from pathlib import Path
from typing import Dict, Mapping, Union

import numpy as np

from core.exceptions import WeightsFormatError

MAGIC = b'MFFW'
VERSION = 1


def save_weights(path: Union[str, Path], tensors: Mapping[str, np.ndarray]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = [MAGIC, struct.pack('<II', VERSION, len(tensors))]
    payload = []
    for name, array in tensors.items():
        encoded = name.encode('utf-8')
        array = np.asarray(array)
        header.append(struct.pack('<H', len(encoded)) + encoded)
        header.append(struct.pack('<B', array.ndim) + struct.pack(f'<{array.ndim}I', *array.shape))
        payload.append(np.ascontiguousarray(array, dtype='<f4').tobytes())
    path.write_bytes(b''.join(header + payload))
    return path


def load_weights(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    """Read a container into float64 arrays keyed by name, in stored order."""
    blob = Path(path).read_bytes()
    try:
        if blob[:4] != MAGIC:
            raise WeightsFormatError(f"{path} is not a weights container", path=str(path))
        version, count = struct.unpack_from('<II', blob, 4)
        if version != VERSION:
            raise WeightsFormatError(f"Unsupported container version {version}", version=version)
        offset = 12
        entries = []
        for _ in range(count):
            (length,) = struct.unpack_from('<H', blob, offset)
            offset += 2
            name = blob[offset:offset + length].decode('utf-8')
            offset += length
            (ndim,) = struct.unpack_from('<B', blob, offset)
            offset += 1
            shape = struct.unpack_from(f'<{ndim}I', blob, offset)
            offset += 4 * ndim
            entries.append((name, shape))

        tensors: Dict[str, np.ndarray] = {}
        for name, shape in entries:
            size = int(np.prod(shape, dtype=np.int64))
            end = offset + 4 * size
            if end > len(blob):
                raise WeightsFormatError(f"Container truncated in tensor '{name}'", tensor=name)
            tensors[name] = np.frombuffer(blob[offset:end], dtype='<f4').astype(np.float64).reshape(shape)
            offset = end
    except (struct.error, UnicodeDecodeError) as exc:
        raise WeightsFormatError(f"Corrupt weights container {path}: {exc}", path=str(path)) from exc

    if offset != len(blob):
        raise WeightsFormatError(f"{len(blob) - offset} trailing bytes in {path}", path=str(path))
    return tensors


def stored_param_count(tensors: Mapping[str, np.ndarray]) -> int:
    return int(sum(np.asarray(t).size for t in tensors.values()))
