"""Amino-acid masses, peptide mass arithmetic and the conflict-mass dictionary.

All masses are monoisotopic and expressed in daltons (Da). Residue masses are
the standard values used throughout CID fragment matching; their integer
roundings ("nominal" masses) are what appear in low-resolution ladder tables.
Isoleucine and leucine share a residue mass and are treated as one symbol:
peptide strings are canonicalized with ``I -> L`` before any arithmetic.
"""

from __future__ import annotations

# Fundamental constants (Da).
PROTON_MASS = 1.00727647
H2O_MASS = 18.0105646863

# Monoisotopic residue masses (Da). I and L are identical by construction.
RESIDUE_MASSES: dict[str, float] = {
    "A": 71.0371138,
    "C": 103.0091845,
    "D": 115.0269430,
    "E": 129.0425931,
    "F": 147.0684139,
    "G": 57.0214637,
    "H": 137.0589119,
    "I": 113.0840640,
    "K": 128.0949630,
    "L": 113.0840640,
    "M": 131.0404846,
    "N": 114.0429274,
    "P": 97.0527639,
    "Q": 128.0585775,
    "R": 156.1011110,
    "S": 87.0320284,
    "T": 101.0476785,
    "V": 99.0684139,
    "W": 186.0793130,
    "Y": 163.0633285,
}

# Canonical alphabet used when generating or mutating sequences: I is folded
# into L, leaving 19 distinct symbols.
CANONICAL_ALPHABET: tuple[str, ...] = tuple(
    sorted(sym for sym in RESIDUE_MASSES if sym != "I")
)

# Single residues whose mass collides with a di-peptide at nominal precision.
CONFLICT_REPLACEMENTS: dict[str, tuple[str, ...]] = {
    "W": ("DA", "AD", "EG", "GE", "VS", "SV"),
    "R": ("VG", "GV"),
    "Q": ("AG", "GA"),
    "N": ("GG",),
}

MAX_PEPTIDE_LENGTH = 64

TRYPTIC_TERMINALS = ("K", "R")


class InvalidResidueError(ValueError):
    """Raised for a symbol outside the 20-letter amino-acid alphabet."""


class InvalidPeptideError(ValueError):
    """Raised for peptide strings violating length or residue constraints."""


def residue_mass(symbol: str) -> float:
    """Monoisotopic residue mass of a single amino-acid symbol."""
    try:
        return RESIDUE_MASSES[symbol]
    except KeyError:
        raise InvalidResidueError(f"unknown amino-acid symbol {symbol!r}") from None


def canonical(sequence: str) -> str:
    """Uppercase a residue string and fold I into L."""
    return sequence.upper().replace("I", "L")


def validate_peptide(sequence: str) -> str:
    """Canonicalize and validate a peptide string, returning the canonical form.

    Length must be 1..64 and every symbol must be a known residue.
    """
    seq = canonical(sequence)
    if not seq:
        raise InvalidPeptideError("empty peptide")
    if len(seq) > MAX_PEPTIDE_LENGTH:
        raise InvalidPeptideError(
            f"peptide length {len(seq)} exceeds maximum {MAX_PEPTIDE_LENGTH}"
        )
    for sym in seq:
        if sym not in RESIDUE_MASSES:
            raise InvalidResidueError(f"unknown amino-acid symbol {sym!r}")
    return seq


def is_tryptic(sequence: str) -> bool:
    """True when the sequence ends in K or R (trypsin cleavage rule)."""
    return bool(sequence) and sequence[-1] in TRYPTIC_TERMINALS


def parent_mass(sequence: str) -> float:
    """Total peptide mass: sum of residue masses plus one water."""
    seq = validate_peptide(sequence)
    return sum(RESIDUE_MASSES[sym] for sym in seq) + H2O_MASS


def precursor_mass(pepmass: float, charge: int) -> float:
    """Neutral precursor mass from the measured m/z and charge state."""
    if pepmass <= 0:
        raise ValueError(f"pepmass must be positive, got {pepmass}")
    if charge < 1:
        raise ValueError(f"charge must be a positive integer, got {charge}")
    return pepmass * charge - charge * PROTON_MASS


def conflict_replacements(symbol: str) -> tuple[str, ...]:
    """Di-peptide replacements sharing the symbol's nominal mass (may be empty)."""
    if symbol not in RESIDUE_MASSES:
        raise InvalidResidueError(f"unknown amino-acid symbol {symbol!r}")
    return CONFLICT_REPLACEMENTS.get(symbol, ())
