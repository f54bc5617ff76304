"""Classical channel model, codecs, and finite-blocklength calculators."""

from .bch import BchCode, DecodeResult, GF2m, smallest_primitive_poly
from .blocks import (
    BchCodec,
    CodeParams,
    ConcatBlockCodec,
    ConcatDecodeResult,
    IdealCodec,
    block_success_probability,
    concat_decode,
    concat_encode,
    mvc_decode,
    mvc_effective_ber,
    mvc_encode,
    parse_codec_spec,
)
from .bsc import BscParams, bsc_controlled, bsc_transmit, bsc_transmit_array
from .fbl import (
    FblInputs,
    binary_entropy,
    channel_capacity,
    channel_dispersion,
    extractable_key_length,
    gaussian_q,
    gaussian_q_inv,
    ppv_max_payload,
    secrecy_capacity,
)

__all__ = [
    "BchCode",
    "BchCodec",
    "BscParams",
    "CodeParams",
    "ConcatBlockCodec",
    "ConcatDecodeResult",
    "DecodeResult",
    "FblInputs",
    "GF2m",
    "IdealCodec",
    "binary_entropy",
    "block_success_probability",
    "bsc_controlled",
    "bsc_transmit",
    "bsc_transmit_array",
    "channel_capacity",
    "channel_dispersion",
    "concat_decode",
    "concat_encode",
    "extractable_key_length",
    "gaussian_q",
    "gaussian_q_inv",
    "mvc_decode",
    "mvc_effective_ber",
    "mvc_encode",
    "parse_codec_spec",
    "ppv_max_payload",
    "secrecy_capacity",
    "smallest_primitive_poly",
]
