"""Mutation-template and input-sampler oracles.

The built-in generators are deterministic.  An external generator (a
subprocess or an HTTP endpoint) can be plugged in; its output is treated as
untrusted text, validated, and replaced by the built-in result on failure.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import re
import shlex
import struct
import subprocess
import urllib.request
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .errors import CircomSyntaxError
from .synth.circom import eval_expr, expr_names, parse_expr

log = logging.getLogger(__name__)

MAX_CANDIDATES = 5
MAX_SITE_LINES = 10

MUTATION_PROMPT = (
    "You are given the following Circom weak assignment on field F_q.\n"
    "Change only the right-hand side.\n"
    "Produce five semantically equivalent variants that bias values to edge cases (0, q-1, small constants).\n"
    "Output one RHS per line, no comments.\n"
    "------\n"
    "<WEAK_ASSIGN>"
)

PATTERN_PROMPT = (
    "Given the following TCCT counter-example, emit:\n"
    "1. A one-sentence trigger description.\n"
    "2. A Rust function fn sample() -> Vec<F> that biases inputs toward this divergence.\n"
    "------\n"
    "<COUNTEREXAMPLE>"
)

_INT = re.compile(r"\b\d+\b")
_ASSIGN = re.compile(r"^\s*[A-Za-z_][A-Za-z0-9_]*\s*<==\s*(.*?);?\s*$")


def canonicalize(text: str) -> str:
    lines = []
    for line in text.splitlines():
        line = line.split("//", 1)[0]
        line = re.sub(r"[ \t]+", " ", line).strip()
        if line:
            lines.append(_INT.sub(lambda m: str(int(m.group())), line))
    return "\n".join(lines)


def template_fingerprint(canonical: str) -> int:
    return int.from_bytes(hashlib.sha256(canonical.encode()).digest()[:8], "big")


def builtin_rhs(q: int) -> list[str]:
    return ["0", str(q - 1), "2", "10", "1"]


@dataclass
class TemplateBatch:
    site_id: str
    candidates: tuple[str, ...]
    provenance: str  # "builtin" or "external(<tool id>)"
    fingerprints: tuple[int, ...]
    log: list[dict] = field(default_factory=list)

    def constants(self, q: int) -> list[int]:
        return [eval_expr(parse_expr(c), {"q": q}, q) for c in self.candidates]

    def to_dict(self) -> dict:
        return {
            "site_id": self.site_id,
            "provenance": self.provenance,
            "candidates": list(self.candidates),
            "fingerprints": [f"{fp:016x}" for fp in self.fingerprints],
            "log": self.log,
        }


class Generator(Protocol):
    tool_id: str

    def generate(self, prompt: str, max_candidates: int) -> str: ...


def _response_text(raw: str) -> str:
    """Accept a JSON object with ``candidates`` or ``text``, else the raw text."""
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError:
        return raw
    if isinstance(doc, dict):
        if isinstance(doc.get("candidates"), list):
            return "\n".join(str(c) for c in doc["candidates"])
        if isinstance(doc.get("text"), str):
            return doc["text"]
    return raw


class SubprocessGenerator:
    """One JSON request line on stdin, response on stdout."""

    def __init__(self, command: str, timeout: float = 30.0):
        self.command = command
        self.timeout = timeout
        self.tool_id = f"subprocess:{command}"

    def generate(self, prompt: str, max_candidates: int) -> str:
        request = json.dumps({"prompt": prompt, "max_candidates": max_candidates}) + "\n"
        proc = subprocess.run(
            shlex.split(self.command),
            input=request,
            capture_output=True,
            text=True,
            timeout=self.timeout,
            check=True,
        )
        return _response_text(proc.stdout)


class HttpGenerator:
    """A single JSON POST ``{prompt, max_candidates}``."""

    def __init__(self, url: str, timeout: float = 30.0):
        self.url = url
        self.timeout = timeout
        self.tool_id = f"http:{url}"

    def generate(self, prompt: str, max_candidates: int) -> str:
        body = json.dumps({"prompt": prompt, "max_candidates": max_candidates}).encode()
        req = urllib.request.Request(self.url, data=body, headers={"Content-Type": "application/json"})
        with urllib.request.urlopen(req, timeout=self.timeout) as resp:
            return _response_text(resp.read().decode("utf-8", "replace"))


def make_generator(spec: str | None) -> Generator | None:
    """``builtin`` (or None), ``subprocess:<cmd>`` or ``http:<url>``."""
    if spec in (None, "", "builtin"):
        return None
    if spec.startswith("subprocess:"):
        return SubprocessGenerator(spec[len("subprocess:"):])
    if spec.startswith("https://"):
        return HttpGenerator(spec)
    if spec.startswith("http:"):
        rest = spec[len("http:"):]
        return HttpGenerator(rest if rest.startswith(("http://", "https://")) else spec)
    raise ValueError(f"unknown oracle {spec!r}")


def _validate_rhs(line: str, q: int) -> str | None:
    """Canonical constant RHS from one line of generator output, or None."""
    text = canonicalize(line)
    if not text or "\n" in text:
        return None
    m = _ASSIGN.match(text)
    rhs = m.group(1) if m else text.rstrip(";").strip()
    try:
        node = parse_expr(rhs)
    except CircomSyntaxError:
        return None
    if expr_names(node) - {"q"}:
        return None
    return canonicalize(rhs)


def _dedup(candidates: Sequence[str]) -> tuple[list[str], list[int]]:
    seen: set[int] = set()
    out, fps = [], []
    for cand in candidates:
        fp = template_fingerprint(cand)
        if fp in seen:
            continue
        seen.add(fp)
        out.append(cand)
        fps.append(fp)
        if len(out) == MAX_CANDIDATES:
            break
    return out, fps


def mutation_templates(site_text: str, q: int, generator: Generator | None = None, site_id: str = "") -> TemplateBatch:
    if len(site_text.splitlines()) > MAX_SITE_LINES:
        raise ValueError(f"weak-assignment site longer than {MAX_SITE_LINES} lines")
    entries: list[dict] = []
    if generator is not None:
        prompt = MUTATION_PROMPT.replace("<WEAK_ASSIGN>", site_text)
        try:
            raw = generator.generate(prompt, MAX_CANDIDATES)
        except Exception as exc:  # untrusted source: any failure downgrades to builtin
            log.warning("template generator %s failed: %s", generator.tool_id, exc)
            entries.append({"event": "generator_error", "detail": type(exc).__name__})
            raw = ""
        valid = []
        for line in raw.splitlines():
            rhs = _validate_rhs(line, q)
            entries.append({"candidate": line.strip()[:200], "valid": rhs is not None})
            if rhs is not None:
                valid.append(rhs)
        survivors, fps = _dedup(valid)
        if survivors:
            return TemplateBatch(site_id, tuple(survivors), f"external({generator.tool_id})", tuple(fps), entries)
        entries.append({"event": "fallback", "detail": "no valid candidates"})
    survivors, fps = _dedup(builtin_rhs(q))
    return TemplateBatch(site_id, tuple(survivors), "builtin", tuple(fps), entries)


# ---------------------------------------------------------------------------
# input samplers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplerSpec:
    """Per-input bias lists; ``uniform_weight`` is the share left to uniform draws."""

    trigger_description: str
    seed: int
    biases: tuple[tuple[tuple[int, float], ...], ...]
    uniform_weight: float = 0.25

    def sample(self, rng: random.Random, q: int) -> list[int]:
        out = []
        for bias in self.biases:
            total = sum(w for _, w in bias) + self.uniform_weight
            r = rng.random() * total
            choice = None
            for value, weight in bias:
                if r < weight:
                    choice = value % q
                    break
                r -= weight
            out.append(rng.randrange(q) if choice is None else choice)
        return out

    def to_dict(self) -> dict:
        return {
            "trigger": self.trigger_description,
            "seed": self.seed,
            "uniform_weight": self.uniform_weight,
            "biases": [[[str(v), w] for v, w in b] for b in self.biases],
        }


def uniform_sampler(num_inputs: int, seed: int = 0) -> SamplerSpec:
    return SamplerSpec("uniform inputs", seed, tuple(() for _ in range(num_inputs)), 1.0)


def pattern_sampler(x_prime: Sequence[int] | None, q: int, seed: int = 0) -> SamplerSpec:
    """Bias inputs toward a known diverging input vector."""
    if x_prime is None:
        raise ValueError("a counterexample input vector is required")
    biases = tuple(
        ((v % q, 0.5), ((v - 1) % q, 0.125), ((v + 1) % q, 0.125)) for v in x_prime
    )
    anchor = ", ".join(str(v % q) for v in x_prime)
    return SamplerSpec(f"outputs diverge near inputs ({anchor})", seed, biases, 0.25)


def external_sampler(generator: Generator, counterexample_json: str, num_inputs: int, q: int, seed: int = 0) -> SamplerSpec:
    """Declarative bias list from an external generator; uniform on any failure.

    Expected response: ``{"trigger": str, "biases": [[[value, weight], ...], ...]}``.
    """
    prompt = PATTERN_PROMPT.replace("<COUNTEREXAMPLE>", counterexample_json)
    try:
        doc = json.loads(generator.generate(prompt, 1))
        biases = tuple(
            tuple((int(v) % q, float(w)) for v, w in per_input) for per_input in doc["biases"]
        )
        if len(biases) != num_inputs or any(w <= 0 for b in biases for _, w in b):
            raise ValueError("bias list has the wrong shape")
        return SamplerSpec(str(doc.get("trigger", ""))[:200], seed, biases, 0.25)
    except Exception as exc:  # untrusted source
        log.warning("sampler generator %s failed: %s", generator.tool_id, exc)
        return uniform_sampler(num_inputs, seed)


def seeded_fallback_constant(seed: int, site_id: str, q: int) -> int:
    """PRF(seed, site) into [0, q), rejection-sampled for uniformity."""
    width = max(32, (q.bit_length() + 7) // 8 + 8)
    space = 256 ** width
    limit = space - space % q
    ctr = 0
    while True:
        raw = b""
        while len(raw) < width:
            raw += hashlib.sha256(
                struct.pack("<Q", seed % (1 << 64)) + site_id.encode() + struct.pack("<I", ctr)
            ).digest()
            ctr += 1
        v = int.from_bytes(raw[:width], "big")
        if v < limit:
            return v % q


def fallback_template(signal: str, constant: int) -> str:
    return f"{signal} <== {constant};"
