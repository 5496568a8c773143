"""Deterministic tree drawings, as ASCII text or standalone SVG."""

from __future__ import annotations

from xml.sax.saxutils import escape

from corchetes.tree import Tree

__all__ = ["render_ascii", "render_svg"]


def _place(text: str, start: int) -> str:
    return " " * start + text


def _block(node) -> tuple[list[str], int]:
    """Render a node to (lines, center-column), bottom-padded later."""
    if isinstance(node, str):
        return [node], (len(node) - 1) // 2

    blocks = [_block(child) for child in node.children]
    centers = []
    offset = 0
    joined: list[list[str]] = []
    height = max(len(lines) for lines, _ in blocks)
    for lines, center in blocks:
        width = max(len(line) for line in lines)
        centers.append(offset + center)
        padded = [line.ljust(width) for line in lines]
        padded += [" " * width] * (height - len(lines))
        joined.append(padded)
        offset += width + 1
    child_rows = [
        " ".join(block[row] for block in joined) for row in range(height)
    ]

    if len(centers) == 1:
        m = centers[0]
    else:
        m = (centers[0] + centers[-1]) // 2
    label_start = m - (len(node.label) - 1) // 2
    if label_start < 0:  # shift the whole block right so the label fits
        shift = -label_start
        child_rows = [" " * shift + row for row in child_rows]
        centers = [c + shift for c in centers]
        m += shift
        label_start = 0

    rows = [_place(node.label, label_start)]
    if len(centers) == 1:
        rows.append(_place("|", m))
    else:
        rail = [" "] * (centers[-1] + 1)
        for i in range(centers[0], centers[-1] + 1):
            rail[i] = "_"
        rail[m] = "|"
        rows.append("".join(rail))
        stems = [" "] * (centers[-1] + 1)
        for c in centers:
            stems[c] = "|"
        rows.append("".join(stems))
    rows.extend(child_rows)
    return rows, m


def render_ascii(tree: Tree) -> str:
    lines, _ = _block(tree)
    return "\n".join(line.rstrip() for line in lines)


_X_STEP = 90
_Y_STEP = 55
_MARGIN = 30


def render_svg(tree: Tree) -> str:
    """A standalone SVG drawing with integer-friendly coordinates."""
    texts: list[str] = []
    edges: list[str] = []
    next_leaf = [0]

    def layout(node, depth: int) -> float:
        y = _MARGIN + depth * _Y_STEP
        if isinstance(node, str):
            x = _MARGIN + next_leaf[0] * _X_STEP
            next_leaf[0] += 1
            texts.append(_text(x, y, node, leaf=True))
            return x
        xs = [layout(child, depth + 1) for child in node.children]
        x = sum(xs) / len(xs)
        texts.append(_text(x, y, node.label, leaf=False))
        for child_x in xs:
            edges.append(
                f'<line x1="{x:g}" y1="{y + 6:g}" x2="{child_x:g}" '
                f'y2="{y + _Y_STEP - 16:g}" stroke="#555"/>'
            )
        return x

    def depth_of(node) -> int:
        if isinstance(node, str):
            return 0
        return 1 + max(depth_of(c) for c in node.children)

    layout(tree, 0)
    width = 2 * _MARGIN + max(next_leaf[0] - 1, 0) * _X_STEP
    height = 2 * _MARGIN + depth_of(tree) * _Y_STEP
    body = "\n".join(edges + texts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" font-family="monospace" font-size="14">\n'
        f"{body}\n</svg>\n"
    )


def _text(x: float, y: float, content: str, leaf: bool) -> str:
    fill = "#000" if leaf else "#1a4a7a"
    return (
        f'<text x="{x:g}" y="{y:g}" text-anchor="middle" '
        f'fill="{fill}">{escape(content)}</text>'
    )
