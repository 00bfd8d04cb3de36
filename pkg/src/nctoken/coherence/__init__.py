from .checker import CoherenceReport, MapInvariantBroken, MismatchAt, StepRecord, check_coherence
from .comp import (
    Append,
    Broadcast,
    CoherenceMaps,
    ComputationalRun,
    Directory,
    SignatureMessage,
    decode_signature_message,
)
from .lemmas import LemmaResult, lemma_c_to_s_check, lemma_s_to_c_check, theorem_balance_check
from .reconstruct import ReconstructionError, reconstruct

__all__ = [
    "Append", "Broadcast", "CoherenceMaps", "CoherenceReport", "ComputationalRun", "Directory",
    "LemmaResult", "MapInvariantBroken", "MismatchAt", "ReconstructionError", "SignatureMessage",
    "StepRecord", "check_coherence", "decode_signature_message", "lemma_c_to_s_check",
    "lemma_s_to_c_check", "reconstruct", "theorem_balance_check",
]
