"""metareason: reduce reasoning task instances to symbolic meta-questions,
solve them exactly, build fused demonstrations, and evaluate LLM paradigms."""

__version__ = "0.1.0"
