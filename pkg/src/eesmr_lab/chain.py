"""Block tree with ancestry queries.

Blocks form a tree rooted at the genesis block. The store keeps every block a
node has ever accepted (including buffered descendants fetched via sync) and
answers the extension queries the protocol's lock/commit rules are built on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .codec import ZERO_DIGEST, encode_block, sha256


@dataclass(frozen=True)
class Block:
    view: int
    round: int
    height: int
    parent: bytes
    commands: tuple[bytes, ...] = ()
    _wire: bytes = field(init=False, repr=False, compare=False, default=b"")
    _digest: bytes = field(init=False, repr=False, compare=False, default=b"")

    def __post_init__(self):
        wire = encode_block(self.view, self.round, self.height, self.parent, self.commands)
        object.__setattr__(self, "_wire", wire)
        object.__setattr__(self, "_digest", sha256(wire))

    @property
    def wire(self) -> bytes:
        return self._wire

    @property
    def digest(self) -> bytes:
        return self._digest

    def __repr__(self):
        return f"Block(v={self.view}, r={self.round}, h={self.height}, d={self.digest.hex()[:8]})"


GENESIS = Block(view=0, round=0, height=0, parent=ZERO_DIGEST)


class BlockStore:
    """Digest-keyed block tree for one node."""

    def __init__(self):
        self._blocks: dict[bytes, Block] = {GENESIS.digest: GENESIS}

    def add(self, block: Block) -> None:
        self._blocks[block.digest] = block

    def get(self, digest: bytes) -> Block | None:
        return self._blocks.get(digest)

    def __contains__(self, digest: bytes) -> bool:
        return digest in self._blocks

    def has_ancestry(self, block: Block) -> bool:
        """True when every ancestor down to genesis is present in the store."""
        cur = block
        while cur.height > 0:
            parent = self._blocks.get(cur.parent)
            if parent is None:
                return False
            cur = parent
        return True

    def extends(self, descendant: Block, ancestor: Block) -> bool:
        """True iff `ancestor` lies on `descendant`'s chain (or they are equal).

        Requires the intermediate blocks to be present; a gap counts as not
        extending, which is the safe answer for validation.
        """
        if ancestor.digest == descendant.digest:
            return True
        cur = descendant
        while cur.height > ancestor.height:
            nxt = self._blocks.get(cur.parent)
            if nxt is None:
                return False
            cur = nxt
        return cur.digest == ancestor.digest

    def missing_ancestor(self, block: Block) -> bytes | None:
        """Digest of the first unknown ancestor on `block`'s chain, if any."""
        cur = block
        while cur.height > 0:
            parent = self._blocks.get(cur.parent)
            if parent is None:
                return cur.parent
            cur = parent
        return None

    def chain_between(self, descendant: Block, ancestor_digest: bytes) -> list[Block] | None:
        """Blocks from (excluding) `ancestor_digest` up to and including `descendant`.

        Returns None when the path is broken or never meets the ancestor.
        """
        out: list[Block] = []
        cur = descendant
        while cur.digest != ancestor_digest:
            out.append(cur)
            if cur.height == 0:
                return None
            nxt = self._blocks.get(cur.parent)
            if nxt is None:
                return None
            cur = nxt
        out.reverse()
        return out
