from codec.axis import decode_axis, encode_axis, encode_fixed_horizontal

__all__ = ["decode_axis", "encode_axis", "encode_fixed_horizontal"]
