#!/usr/bin/env python3
"""
Точная алгебра струйных переменных поля sine-Gordon
- Коэффициенты: полиномы Лорана по константе связи a над рациональными числами
- Мономы от производных φ_{kξ} по светоконусной координате ξ
- Тригонометрические моды cos(m·aφ), sin(m·aφ) с разложением произведений в суммы
- Производные ∂ξ (свободная) и ∂τ (на решениях уравнения движения)
"""

import functools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple, Union

import sympy

Rational = Union[int, Fraction]


class DomainError(Exception):
    """Операция не определена на данном элементе алгебры"""


def _as_fraction(value: Rational) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    raise DomainError(f"Ожидалось точное рациональное число, получено {value!r}")


class CoeffRing:
    """Полином Лорана по a: словарь {показатель z: рациональный коэффициент}"""

    __slots__ = ('_terms',)

    def __init__(self, terms: Optional[Dict[int, Rational]] = None):
        clean = {}
        for z, q in (terms or {}).items():
            q = _as_fraction(q)
            if q != 0:
                clean[int(z)] = q
        self._terms = clean

    @classmethod
    def zero(cls) -> 'CoeffRing':
        return cls()

    @classmethod
    def one(cls) -> 'CoeffRing':
        return cls({0: 1})

    @classmethod
    def scalar(cls, q: Rational) -> 'CoeffRing':
        return cls({0: q})

    @classmethod
    def monomial(cls, z: int, q: Rational = 1) -> 'CoeffRing':
        """q·a^z"""
        return cls({z: q})

    @property
    def terms(self) -> Dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def items(self) -> List[Tuple[int, Fraction]]:
        return sorted(self._terms.items())

    def __add__(self, other: 'CoeffRing') -> 'CoeffRing':
        result = dict(self._terms)
        for z, q in other._terms.items():
            result[z] = result.get(z, 0) + q
        return CoeffRing(result)

    def __neg__(self) -> 'CoeffRing':
        return CoeffRing({z: -q for z, q in self._terms.items()})

    def __sub__(self, other: 'CoeffRing') -> 'CoeffRing':
        return self + (-other)

    def __mul__(self, other: 'CoeffRing') -> 'CoeffRing':
        result: Dict[int, Fraction] = {}
        for z1, q1 in self._terms.items():
            for z2, q2 in other._terms.items():
                result[z1 + z2] = result.get(z1 + z2, 0) + q1 * q2
        return CoeffRing(result)

    def scale(self, q: Rational) -> 'CoeffRing':
        q = _as_fraction(q)
        return CoeffRing({z: c * q for z, c in self._terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, CoeffRing) and self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self.items()))

    def evaluate(self, value: Rational) -> Fraction:
        """Подставить a = value (value ≠ 0, так как встречаются отрицательные степени)"""
        value = _as_fraction(value)
        if value == 0:
            raise DomainError("Подстановка a = 0 невозможна: коэффициенты содержат a в отрицательных степенях")
        return sum((q * value ** z for z, q in self._terms.items()), Fraction(0))

    def to_sympy(self, a: sympy.Symbol) -> sympy.Expr:
        return sympy.Add(*[sympy.Rational(q.numerator, q.denominator) * a ** z for z, q in self.items()])

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for z, q in self.items():
            if z == 0:
                parts.append(str(q))
            elif z == 1:
                parts.append(f"{q}*a")
            else:
                parts.append(f"{q}*a^{z}")
        return " + ".join(parts)


@dataclass(frozen=True, order=True)
class JetMonomial:
    """Моном Π φ_{kξ}^{e_k}; exponents хранится отсортированным без нулевых степеней"""

    exponents: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def from_dict(cls, exponents: Dict[int, int]) -> 'JetMonomial':
        for k, e in exponents.items():
            if k < 0 or e < 0:
                raise DomainError(f"Недопустимая струйная переменная: порядок {k}, степень {e}")
        return cls(tuple(sorted((k, e) for k, e in exponents.items() if e != 0)))

    @classmethod
    def jet(cls, k: int, e: int = 1) -> 'JetMonomial':
        return cls.from_dict({k: e})

    def as_dict(self) -> Dict[int, int]:
        return dict(self.exponents)

    def __mul__(self, other: 'JetMonomial') -> 'JetMonomial':
        merged = dict(self.exponents)
        for k, e in other.exponents:
            merged[k] = merged.get(k, 0) + e
        return JetMonomial.from_dict(merged)

    @property
    def degree(self) -> int:
        return sum(k * e for k, e in self.exponents)

    @property
    def min_order(self) -> Optional[int]:
        return self.exponents[0][0] if self.exponents else None


class TrigKind(Enum):
    UNIT = 0
    SIN = 1
    COS = 2


@dataclass(frozen=True)
class TrigMode:
    """Множитель 1, sin(m·aφ) или cos(m·aφ); степень всегда 0"""

    kind: TrigKind = TrigKind.UNIT
    mode: int = 0

    @staticmethod
    def normalize(kind: TrigKind, mode: int) -> Optional[Tuple[int, 'TrigMode']]:
        """Привести к канонической форме: (знак, мода) или None для нуля"""
        if kind == TrigKind.UNIT:
            return 1, TrigMode()
        sign = 1
        if mode < 0:
            mode = -mode
            if kind == TrigKind.SIN:
                sign = -1
        if mode == 0:
            if kind == TrigKind.SIN:
                return None
            return 1, TrigMode()
        return sign, TrigMode(kind, mode)

    @property
    def sort_key(self) -> Tuple[int, int]:
        return self.kind.value, self.mode

    def __mul__(self, other: 'TrigMode') -> List[Tuple[Fraction, 'TrigMode']]:
        if self.kind == TrigKind.UNIT:
            return [(Fraction(1), other)]
        if other.kind == TrigKind.UNIT:
            return [(Fraction(1), self)]

        half = Fraction(1, 2)
        m1, m2 = self.mode, other.mode
        if self.kind == TrigKind.COS and other.kind == TrigKind.COS:
            raw = [(half, TrigKind.COS, m1 - m2), (half, TrigKind.COS, m1 + m2)]
        elif self.kind == TrigKind.SIN and other.kind == TrigKind.SIN:
            raw = [(half, TrigKind.COS, m1 - m2), (-half, TrigKind.COS, m1 + m2)]
        elif self.kind == TrigKind.SIN:
            raw = [(half, TrigKind.SIN, m1 + m2), (half, TrigKind.SIN, m1 - m2)]
        else:
            raw = [(half, TrigKind.SIN, m1 + m2), (half, TrigKind.SIN, m2 - m1)]

        result = []
        for coeff, kind, mode in raw:
            normalized = TrigMode.normalize(kind, mode)
            if normalized is not None:
                sign, trig = normalized
                result.append((coeff * sign, trig))
        return result


TermKey = Tuple[JetMonomial, TrigMode]
UNIT = TrigMode()


class Expr:
    """Элемент алгебры: конечная сумма коэффициент × моном × тригонометрическая мода"""

    __slots__ = ('_terms',)

    def __init__(self, terms: Optional[Dict[TermKey, CoeffRing]] = None):
        self._terms = {key: c for key, c in (terms or {}).items() if not c.is_zero()}

    # --- конструкторы ---

    @classmethod
    def zero(cls) -> 'Expr':
        return cls()

    @classmethod
    def constant(cls, coeff: Union[CoeffRing, Rational]) -> 'Expr':
        if not isinstance(coeff, CoeffRing):
            coeff = CoeffRing.scalar(coeff)
        return cls({(JetMonomial(), UNIT): coeff})

    @classmethod
    def one(cls) -> 'Expr':
        return cls.constant(1)

    @classmethod
    def jet(cls, k: int, e: int = 1, coeff: Union[CoeffRing, Rational, None] = None) -> 'Expr':
        """coeff·φ_{kξ}^e"""
        if coeff is None:
            coeff = CoeffRing.one()
        elif not isinstance(coeff, CoeffRing):
            coeff = CoeffRing.scalar(coeff)
        return cls({(JetMonomial.jet(k, e), UNIT): coeff})

    @classmethod
    def trig(cls, kind: TrigKind, mode: int = 1) -> 'Expr':
        normalized = TrigMode.normalize(kind, mode)
        if normalized is None:
            return cls()
        sign, trig = normalized
        return cls({(JetMonomial(), trig): CoeffRing.scalar(sign)})

    @classmethod
    def cos(cls, mode: int = 1) -> 'Expr':
        return cls.trig(TrigKind.COS, mode)

    @classmethod
    def sin(cls, mode: int = 1) -> 'Expr':
        return cls.trig(TrigKind.SIN, mode)

    # --- доступ ---

    @property
    def terms(self) -> Dict[TermKey, CoeffRing]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def sorted_terms(self) -> List[Tuple[TermKey, CoeffRing]]:
        return sorted(self._terms.items(), key=lambda item: (item[0][0].exponents, item[0][1].sort_key))

    def is_trig_free(self) -> bool:
        return all(trig.kind == TrigKind.UNIT for _, trig in self._terms)

    def jet_orders(self) -> List[int]:
        return sorted({k for mono, _ in self._terms for k, _ in mono.exponents})

    # --- арифметика ---

    def __add__(self, other: 'Expr') -> 'Expr':
        result = dict(self._terms)
        for key, c in other._terms.items():
            result[key] = result[key] + c if key in result else c
        return Expr(result)

    def __neg__(self) -> 'Expr':
        return Expr({key: -c for key, c in self._terms.items()})

    def __sub__(self, other: 'Expr') -> 'Expr':
        return self + (-other)

    def __mul__(self, other: 'Expr') -> 'Expr':
        result: Dict[TermKey, CoeffRing] = {}
        for (mono1, trig1), c1 in self._terms.items():
            for (mono2, trig2), c2 in other._terms.items():
                mono = mono1 * mono2
                coeff = c1 * c2
                for factor, trig in trig1 * trig2:
                    key = (mono, trig)
                    term = coeff.scale(factor)
                    result[key] = result[key] + term if key in result else term
        return Expr(result)

    def scale(self, coeff: Union[CoeffRing, Rational]) -> 'Expr':
        if not isinstance(coeff, CoeffRing):
            coeff = CoeffRing.scalar(coeff)
        return Expr({key: c * coeff for key, c in self._terms.items()})

    def __pow__(self, exponent: int) -> 'Expr':
        if exponent < 0:
            raise DomainError("Отрицательные степени не поддерживаются")
        result = Expr.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, Expr) and self._terms == other._terms

    def __hash__(self):
        return hash(tuple((key, c) for key, c in self.sorted_terms()))

    def __repr__(self):
        return f"Expr({to_text(self)})"

    def to_sympy(self) -> sympy.Expr:
        return to_sympy(self)


# --- операции ---

def add(x: Expr, y: Expr) -> Expr:
    return x + y


def mul(x: Expr, y: Expr) -> Expr:
    return x * y


def d_xi(x: Expr) -> Expr:
    """Полная производная по ξ (правило Лейбница)"""
    result: Dict[TermKey, CoeffRing] = {}

    def accumulate(key: TermKey, coeff: CoeffRing):
        result[key] = result[key] + coeff if key in result else coeff

    for (mono, trig), coeff in x.terms.items():
        exponents = mono.as_dict()
        for k, e in mono.exponents:
            shifted = dict(exponents)
            shifted[k] -= 1
            shifted[k + 1] = shifted.get(k + 1, 0) + 1
            accumulate((JetMonomial.from_dict(shifted), trig), coeff.scale(e))

        if trig.kind != TrigKind.UNIT:
            # ∂ξ cos(maφ) = -m·a·φ_ξ·sin(maφ), ∂ξ sin(maφ) = m·a·φ_ξ·cos(maφ)
            if trig.kind == TrigKind.COS:
                factor, partner = -trig.mode, TrigMode(TrigKind.SIN, trig.mode)
            else:
                factor, partner = trig.mode, TrigMode(TrigKind.COS, trig.mode)
            accumulate((mono * JetMonomial.jet(1), partner), coeff * CoeffRing.monomial(1, factor))

    return Expr(result)


@functools.lru_cache(maxsize=None)
def _onshell_jet_derivative(k: int) -> Expr:
    """∂τ φ_{kξ} = ∂ξ^{k-1}(a·sin(aφ)) на решениях φ_{ξτ} = a·sin(aφ)"""
    expr = Expr.sin(1).scale(CoeffRing.monomial(1))
    for _ in range(k - 1):
        expr = d_xi(expr)
    return expr


def d_tau_onshell(x: Expr) -> Expr:
    """Производная по τ с подстановкой уравнения движения; определена для тригонометрически свободных
    выражений без φ"""
    for (mono, trig) in x.terms:
        if trig.kind != TrigKind.UNIT:
            raise DomainError("∂τ на решениях не выражается в алгебре: выражение содержит тригонометрический множитель")
        if mono.min_order == 0:
            raise DomainError("∂τ на решениях не выражается в алгебре: выражение содержит φ без производных")

    result = Expr.zero()
    for (mono, trig), coeff in x.terms.items():
        exponents = mono.as_dict()
        for k, e in mono.exponents:
            rest = dict(exponents)
            rest[k] -= 1
            factor = Expr({(JetMonomial.from_dict(rest), UNIT): coeff.scale(e)})
            result = result + factor * _onshell_jet_derivative(k)
    return result


def degree(x: Expr) -> Tuple[bool, Optional[int]]:
    """(однородно?, степень) по правилу deg φ_{kξ} = k; для нуля степень не определена"""
    if x.is_zero():
        raise DomainError("Степень нулевого выражения не определена")
    degrees = {mono.degree for mono, _ in x.terms}
    if len(degrees) == 1:
        return True, degrees.pop()
    return False, None


def substitute_coupling(x: Expr, value: Rational) -> Expr:
    value = _as_fraction(value)
    if value == 0:
        raise DomainError("Подстановка a = 0 невозможна")
    return Expr({key: CoeffRing.scalar(c.evaluate(value)) for key, c in x.terms.items()})


# --- каноническая сериализация ---

def serialize(x: Expr) -> List[dict]:
    records = []
    for (mono, trig), coeff in x.sorted_terms():
        records.append({
            'coeff': [[z, q.numerator, q.denominator] for z, q in coeff.items()],
            'jets': [[k, e] for k, e in mono.exponents],
            'trig': {'kind': trig.kind.name.capitalize(), 'mode': trig.mode}
        })
    return records


_TRIG_KINDS = {kind.name.capitalize(): kind for kind in TrigKind}


def parse(records: Iterable[dict]) -> Expr:
    """Обратная операция к serialize; некорректные записи отвергаются"""
    terms: Dict[TermKey, CoeffRing] = {}
    try:
        for record in records:
            coeff = CoeffRing({int(z): Fraction(int(num), int(den)) for z, num, den in record['coeff']})
            if coeff.is_zero():
                raise DomainError("Нулевой коэффициент в сериализованном выражении")
            mono = JetMonomial.from_dict({int(k): int(e) for k, e in record['jets']})
            kind = _TRIG_KINDS.get(record['trig']['kind'])
            if kind is None:
                raise DomainError(f"Неизвестный вид тригонометрии: {record['trig']['kind']!r}")
            normalized = TrigMode.normalize(kind, int(record['trig']['mode']))
            if (normalized is None or normalized[0] != 1 or normalized[1].kind != kind
                    or normalized[1].mode != int(record['trig']['mode'])):
                raise DomainError(f"Неканоническая тригонометрическая мода: {record['trig']}")
            key = (mono, normalized[1])
            if key in terms:
                raise DomainError("Повторяющийся ключ в сериализованном выражении")
            terms[key] = coeff
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise DomainError(f"Некорректная сериализация выражения: {e}")
    return Expr(terms)


# --- отображение ---

_XI = "ξ"


def jet_name(k: int) -> str:
    if k == 0:
        return "φ"
    if k <= 3:
        return "φ_" + _XI * k
    return f"φ_{k}{_XI}"


def jet_latex(k: int) -> str:
    if k == 0:
        return r"\varphi"
    if k <= 3:
        return r"\varphi_{" + r"\xi" * k + "}"
    return r"\varphi_{" + str(k) + r"\xi}"


def _coeff_text(coeff: CoeffRing) -> str:
    parts = []
    for z, q in coeff.items():
        if z == 0:
            parts.append(str(q))
        elif z > 0:
            power = "a" if z == 1 else f"a^{z}"
            parts.append(power if q == 1 else f"{q}·{power}")
        else:
            power = "a" if z == -1 else f"a^{-z}"
            if q.denominator == 1:
                parts.append(f"{q.numerator}/{power}")
            else:
                parts.append(f"{q.numerator}/({q.denominator}{power})")
    return parts[0] if len(parts) == 1 else "(" + " + ".join(parts) + ")"


def to_text(x: Expr) -> str:
    """Компактная детерминированная запись, например 1/(3a) φ_ξ^3 + 2/a^3 φ_ξξξ"""
    if x.is_zero():
        return "0"
    rendered = []
    for (mono, trig), coeff in x.sorted_terms():
        factors = []
        for k, e in mono.exponents:
            factors.append(jet_name(k) if e == 1 else f"{jet_name(k)}^{e}")
        if trig.kind != TrigKind.UNIT:
            arg = "aφ" if trig.mode == 1 else f"{trig.mode}aφ"
            factors.append(f"{trig.kind.name.lower()}({arg})")
        coeff_text = _coeff_text(coeff)
        if factors and coeff_text == "1":
            rendered.append(" ".join(factors))
        elif factors and coeff_text == "-1":
            rendered.append("-" + " ".join(factors))
        else:
            rendered.append(" ".join([coeff_text] + factors))
    return " + ".join(rendered).replace("+ -", "- ")


def jet_symbols(max_order: int) -> Dict[int, sympy.Symbol]:
    return {k: sympy.Symbol(f"phi_{k}") for k in range(max_order + 1)}


COUPLING = sympy.Symbol('a', positive=True)


def to_sympy(x: Expr) -> sympy.Expr:
    orders = x.jet_orders()
    symbols = jet_symbols(max(orders) if orders else 0)
    phi = symbols[0]
    result = []
    for (mono, trig), coeff in x.sorted_terms():
        term = coeff.to_sympy(COUPLING)
        for k, e in mono.exponents:
            term *= symbols[k] ** e
        if trig.kind == TrigKind.COS:
            term *= sympy.cos(trig.mode * COUPLING * phi)
        elif trig.kind == TrigKind.SIN:
            term *= sympy.sin(trig.mode * COUPLING * phi)
        result.append(term)
    return sympy.Add(*result)


def to_latex(x: Expr) -> str:
    orders = x.jet_orders()
    symbols = jet_symbols(max(orders) if orders else 0)
    names = {symbol: jet_latex(k) for k, symbol in symbols.items()}
    return sympy.latex(to_sympy(x), symbol_names=names)
