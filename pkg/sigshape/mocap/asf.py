# ASF skeleton parsing and serialization
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from sigshape.core.errors import DanglingParent, DataError, MissingSection, UnknownDof, UnknownJoint

logger = logging.getLogger('SigShape.asf')

ROTATION_DOFS = ('rx', 'ry', 'rz')
KNOWN_DOFS = ROTATION_DOFS + ('tx', 'ty', 'tz', 'l')
_BONE_KEYWORDS = {'id', 'name', 'direction', 'length', 'axis', 'dof', 'limits', 'bodymass', 'cofmass'}


@dataclass(frozen=True)
class Joint:
    """One ASF joint.

    dofs lists every channel in file order (translations included); axis holds
    the pre-rotation angles in radians, applied in axis_order about fixed axes.
    """

    name: str
    dofs: Tuple[str, ...] = ()
    axis: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    axis_order: str = 'XYZ'
    parent: Optional[str] = None

    @property
    def rotational_dofs(self) -> Tuple[str, ...]:
        return tuple(d for d in self.dofs if d in ROTATION_DOFS)


@dataclass(frozen=True)
class Skeleton:
    joints: Tuple[Joint, ...]
    degrees: bool = False
    name: str = ''

    def __post_init__(self):
        names = [j.name for j in self.joints]
        if not names or names[0] != 'root':
            raise MissingSection("skeleton has no root joint")
        if len(set(names)) != len(names):
            raise DataError(f"duplicate joint names in {names}")
        for j in self.joints[1:]:
            if j.parent is not None and j.parent not in names:
                raise DanglingParent(f"joint {j.name!r} refers to unknown parent {j.parent!r}")

    @property
    def names(self) -> List[str]:
        return [j.name for j in self.joints]

    def joint(self, name: str) -> Joint:
        for j in self.joints:
            if j.name == name:
                return j
        raise UnknownJoint(f"skeleton has no joint named {name!r}")

    @property
    def root(self) -> Joint:
        return self.joints[0]


def _strip(text: str) -> List[Tuple[int, List[str]]]:
    """Tokenized non-empty lines with their 1-based numbers, comments dropped."""
    out = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if line:
            out.append((number, line.split()))
    return out


def _sections(lines) -> Dict[str, List[Tuple[int, List[str]]]]:
    sections: Dict[str, List[Tuple[int, List[str]]]] = {}
    current = None
    for number, tokens in lines:
        if tokens[0].startswith(':'):
            current = tokens[0].lower()
            sections[current] = []
            rest = tokens[1:]
            if rest:
                sections[current].append((number, rest))
        elif current is not None:
            sections[current].append((number, tokens))
    return sections


def _floats(tokens: List[str], number: int, count: int) -> List[float]:
    try:
        values = [float(t) for t in tokens[:count]]
    except ValueError:
        raise DataError(f"expected {count} numbers, got {' '.join(tokens)}", line=number) from None
    if len(values) != count:
        raise DataError(f"expected {count} numbers, got {len(values)}", line=number)
    return values


def _dofs(tokens: List[str], number: int) -> Tuple[str, ...]:
    dofs = tuple(t.lower() for t in tokens)
    for d in dofs:
        if d not in KNOWN_DOFS:
            raise UnknownDof(f"unknown degree of freedom {d!r}", line=number)
    return dofs


def _axis_order(token: str, number: int) -> str:
    order = token.upper()
    if sorted(order) != ['X', 'Y', 'Z']:
        raise DataError(f"axis order must permute XYZ, got {token!r}", line=number)
    return order


def _parse_root(entries, to_rad: float) -> Joint:
    dofs: Tuple[str, ...] = ()
    axis = (0.0, 0.0, 0.0)
    order = 'XYZ'
    for number, tokens in entries:
        key = tokens[0].lower()
        if key == 'order':
            dofs = _dofs(tokens[1:], number)
        elif key == 'axis':
            order = _axis_order(tokens[1], number)
        elif key == 'orientation':
            axis = tuple(v * to_rad for v in _floats(tokens[1:], number, 3))
    return Joint('root', dofs, axis, order, None)


def _parse_bones(entries, to_rad: float) -> List[Joint]:
    bones = []
    block: Optional[dict] = None
    for number, tokens in entries:
        key = tokens[0].lower()
        if key == 'begin':
            block = {'dofs': (), 'axis': (0.0, 0.0, 0.0), 'order': 'XYZ', 'line': number}
            continue
        if block is None:
            continue
        if key == 'end':
            if 'name' not in block:
                raise DataError("bone block without a name", line=block['line'])
            bones.append(Joint(block['name'], block['dofs'], block['axis'], block['order']))
            block = None
        elif key == 'name':
            block['name'] = tokens[1]
        elif key == 'dof':
            block['dofs'] = _dofs(tokens[1:], number)
        elif key == 'axis':
            block['axis'] = tuple(v * to_rad for v in _floats(tokens[1:], number, 3))
            if len(tokens) > 4:
                block['order'] = _axis_order(tokens[4], number)
        elif key not in _BONE_KEYWORDS and not key.startswith('('):
            logger.debug(f"Ignoring bone entry {key!r} at line {number}")
    return bones


def parse_asf(text: str, path: Optional[str] = None) -> Skeleton:
    """
    Parse the text of an ASF skeleton file.

    Args:
        text (str): File contents
        path (str): Source path, used in error messages

    Returns:
        Skeleton: Joints in file order, root first, axes in radians
    """
    try:
        sections = _sections(_strip(text))
        for required in (':root', ':hierarchy'):
            if required not in sections:
                raise MissingSection(f"missing {required} section")

        degrees = False
        for _, tokens in sections.get(':units', []):
            if tokens[0].lower() == 'angle' and len(tokens) > 1:
                degrees = tokens[1].lower().startswith('deg')
        to_rad = np.pi / 180.0 if degrees else 1.0

        root = _parse_root(sections[':root'], to_rad)
        bones = {b.name: b for b in _parse_bones(sections.get(':bonedata', []), to_rad)}
        order = ['root'] + list(bones)
        parents: Dict[str, str] = {}
        for number, tokens in sections[':hierarchy']:
            if tokens[0].lower() in ('begin', 'end'):
                continue
            parent, children = tokens[0], tokens[1:]
            if parent not in order:
                raise DanglingParent(f"hierarchy names unknown joint {parent!r}", line=number)
            for child in children:
                if child not in bones:
                    raise DanglingParent(f"hierarchy names unknown joint {child!r}", line=number)
                parents[child] = parent

        for name in bones:
            if name not in parents:
                logger.warning(f"Bone {name!r} is not attached in the hierarchy")
        joints = [root] + [Joint(b.name, b.dofs, b.axis, b.axis_order, parents.get(b.name)) for b in bones.values()]
        name = ' '.join(tokens[0] for _, tokens in sections.get(':name', [])[:1])
        skeleton = Skeleton(tuple(joints), degrees, name)
    except DataError as e:
        raise e.with_location(path)
    logger.info(f"Parsed skeleton with {len(skeleton.joints)} joints")
    return skeleton


def _fmt(value: float) -> str:
    return repr(float(value))


def write_asf(skeleton: Skeleton) -> str:
    """Serialize a skeleton back to ASF text in its own angle unit."""
    scale = 180.0 / np.pi if skeleton.degrees else 1.0
    root = skeleton.root
    lines = [':version 1.10']
    if skeleton.name:
        lines.append(f':name {skeleton.name}')
    lines += [':units', f"  angle {'deg' if skeleton.degrees else 'rad'}", ':root']
    if root.dofs:
        lines.append('  order ' + ' '.join(d.upper() for d in root.dofs))
    lines.append(f'  axis {root.axis_order}')
    lines.append('  position 0 0 0')
    lines.append('  orientation ' + ' '.join(_fmt(a * scale) for a in root.axis))
    lines.append(':bonedata')
    for idx, j in enumerate(skeleton.joints[1:], start=1):
        lines += ['  begin', f'    id {idx}', f'    name {j.name}',
                  '    axis ' + ' '.join(_fmt(a * scale) for a in j.axis) + f' {j.axis_order}']
        if j.dofs:
            lines.append('    dof ' + ' '.join(j.dofs))
        lines.append('  end')
    lines += [':hierarchy', '  begin']
    for parent in skeleton.names:
        children = [j.name for j in skeleton.joints[1:] if j.parent == parent]
        if children:
            lines.append(f"    {parent} {' '.join(children)}")
    lines += ['  end', '']
    return '\n'.join(lines)
