#!/usr/bin/env python3
"""Convert a Hugging Face tokenizer.json into a gmask vocabulary file.

Usage: hf_tokenizer_to_vocab.py tokenizer.json vocab.json [--eos TOKEN]

Added tokens become special tokens. Byte-level BPE vocabularies keep their GPT-2 alphabet and are
marked "byte_level": true, so gmask maps them back to raw bytes on load. SentencePiece-style
byte-fallback tokens such as <0x0A> are written as the raw byte with a \\xHH escape.
"""
import argparse
import json
import re
import sys

BYTE_FALLBACK = re.compile(r"^<0x([0-9A-Fa-f]{2})>$")


def is_byte_level(tok):
    def has_byte_level(node):
        if not isinstance(node, dict):
            return False
        if node.get("type") == "ByteLevel":
            return True
        return any(has_byte_level(c) for c in node.get("pretokenizers", []) + node.get("decoders", []))

    return has_byte_level(tok.get("pre_tokenizer")) or has_byte_level(tok.get("decoder"))


def escape(text, fallback_byte=None):
    """JSON string body; `fallback_byte` emits a single raw byte as \\xHH."""
    if fallback_byte is not None:
        return "\\x%02X" % fallback_byte
    return json.dumps(text, ensure_ascii=False)[1:-1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("tokenizer")
    ap.add_argument("output")
    ap.add_argument("--eos", help="EOS token text (default: guessed from common names)")
    args = ap.parse_args()

    with open(args.tokenizer, encoding="utf-8") as f:
        tok = json.load(f)
    vocab = dict(tok["model"]["vocab"])
    added = {t["content"]: t["id"] for t in tok.get("added_tokens", [])}
    vocab.update(added)
    size = max(vocab.values()) + 1
    tokens = [None] * size
    for text, i in vocab.items():
        tokens[i] = text
    byte_level = is_byte_level(tok)
    special = sorted(set(added.values()) | {i for i, t in enumerate(tokens) if t is None})

    eos_names = [args.eos] if args.eos else ["</s>", "<|endoftext|>", "<|eot_id|>", "<|im_end|>", "<eos>"]
    eos = next((vocab[n] for n in eos_names if n in vocab), None)
    if eos is None:
        sys.exit("cannot find an EOS token; pass --eos")
    if eos not in special:
        special.append(eos)
        special.sort()

    parts = []
    for i, text in enumerate(tokens):
        if text is None:
            parts.append('"<unused_%d>"' % i)
            continue
        m = BYTE_FALLBACK.match(text) if not byte_level and i not in special else None
        if m:
            parts.append('"%s"' % escape(text, int(m.group(1), 16)))
        elif not byte_level and i not in special:
            parts.append('"%s"' % escape(text.replace("▁", " ")))
        else:
            parts.append('"%s"' % escape(text))
    with open(args.output, "w", encoding="utf-8") as f:
        f.write('{"byte_level": %s, "eos_id": %d, "special": %s, "tokens": [\n'
                % ("true" if byte_level else "false", eos, json.dumps(special)))
        f.write(",\n".join(parts))
        f.write("\n]}\n")
    print(f"{args.output}: {size} tokens, {len(special)} special, eos {eos}")


if __name__ == "__main__":
    main()
