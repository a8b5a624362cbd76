"""Monotonic cone-of-influence slicing over guarded SSA equations."""

from __future__ import annotations

from dataclasses import dataclass, field

_ROOT_KINDS = ("prop", "assume", "constraint")


@dataclass
class SliceState:
    enabled: bool = True
    kept: set = field(default_factory=set)
    defining: dict = field(default_factory=dict)  # SsaName -> equation
    generated: int = 0
    has_property: bool = False
    _pending_assumes: list = field(default_factory=list)

    def slice_increment(self, new_equations: list) -> list:
        """Equations newly added to the slice by this increment, in generation order."""
        self.generated += len(new_equations)
        if not self.enabled:
            for eq in new_equations:
                self.kept.add(eq.id)
            return list(new_equations)
        before = len(self.kept)
        roots = []
        for eq in new_equations:
            self.defining[eq.lhs] = eq
            if eq.kind == "prop":
                self.has_property = True
                roots.append(eq)
            elif eq.kind == "constraint":
                roots.append(eq)
            elif eq.kind == "assume":
                self._pending_assumes.append(eq)
        if self.has_property and self._pending_assumes:
            # path constraints are never dropped once a property exists
            roots.extend(self._pending_assumes)
            self._pending_assumes = []
        added = []
        work = [eq for eq in roots if eq.id not in self.kept]
        for eq in work:
            self.kept.add(eq.id)
        while work:
            eq = work.pop()
            added.append(eq)
            for name in eq.reads:
                dep = self.defining.get(name)
                if dep is not None and dep.id not in self.kept:
                    self.kept.add(dep.id)
                    work.append(dep)
        assert len(self.kept) >= before  # monotone
        added.sort(key=lambda e: e.id)
        return added


def full_slice(equations: list) -> set:
    """From-scratch backward slice of ``equations`` (reference for the incremental one)."""
    st = SliceState()
    st.slice_increment(equations)
    return set(st.kept)
