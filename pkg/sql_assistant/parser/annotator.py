"""Keyword-driven annotation of a tokenized statement.

The recognizer never validates: it classifies the statement from its leading
keyword, cuts clauses at keyword boundaries and harvests tables, columns,
predicates and DDL facts best-effort. Anything it does not understand stays in
the token list and is left out of the clause map.
"""

from __future__ import annotations

from typing import Optional

from sql_assistant.logger import GLOBAL_LOGGER as log
from sql_assistant.parser.lexer import tokenize
from sql_assistant.parser.models import (
    AnnotatedStatement,
    ClauseRole,
    ColumnDef,
    ColumnRef,
    ConstraintDecl,
    ConstraintKind,
    IndexDef,
    Operand,
    OperandKind,
    Predicate,
    RawStatement,
    Span,
    StatementKind,
    TableRef,
    Token,
    TokenType,
    canonical,
)

COMPARISON_OPERATORS = frozenset({"=", "==", "<>", "!=", "<", ">", "<=", ">=", "~", "!~", "~*", "!~*"})
PATTERN_WORDS = frozenset({"LIKE", "ILIKE", "RLIKE", "REGEXP"})
JOIN_START = frozenset({"JOIN", "INNER", "LEFT", "RIGHT", "FULL", "CROSS", "NATURAL", "STRAIGHT_JOIN"})
JOIN_MODIFIERS = frozenset({"INNER", "LEFT", "RIGHT", "FULL", "CROSS", "NATURAL", "OUTER"})
REGION_BOUNDARY = frozenset(
    {"WHERE", "GROUP", "ORDER", "HAVING", "LIMIT", "OFFSET", "FETCH", "UNION", "INTERSECT",
     "EXCEPT", "RETURNING", "WINDOW", "ON", "USING", "FROM", "SET", "VALUES"}
) | JOIN_START
CLAUSE_STOP = frozenset({"UNION", "INTERSECT", "EXCEPT", "RETURNING", "WINDOW"})
TABLE_ELEMENT_START = frozenset({"CONSTRAINT", "PRIMARY", "FOREIGN", "UNIQUE", "CHECK", "KEY", "INDEX", "FULLTEXT", "SPATIAL", "LIKE"})
TYPE_KEYWORDS = frozenset({"INTERVAL"})
TYPE_STOP = frozenset({"GENERATED", "COMMENT", "ENCODE", "IDENTITY"})
DML_KINDS = frozenset({StatementKind.SELECT, StatementKind.INSERT, StatementKind.UPDATE, StatementKind.DELETE})


class _Annotator:
    def __init__(self, raw: RawStatement, tokens: list[Token]):
        self.raw = raw
        self.tokens = tokens
        self.n = len(tokens)
        self.diagnostics: list[str] = []
        self.kind = StatementKind.OTHER

        self.depth: list[int] = []
        self.parent: list[int] = []
        self.match: dict[int, int] = {}
        self._index_parens()
        self.end = next(
            (i for i, t in enumerate(tokens) if t.type is TokenType.PUNCTUATION and t.text == ";" and self.depth[i] == 0),
            self.n,
        )

        self.clauses: dict[ClauseRole, list[Span]] = {}
        self.consumed: set[int] = set()
        self.cte_names: set[str] = set()
        self.table_refs: list[TableRef] = []
        self.extra_tables: list[tuple[int, str]] = []
        self.columns: list[ColumnRef] = []
        self.constraints: list[ConstraintDecl] = []
        self.column_defs: list[ColumnDef] = []
        self.index_defs: list[IndexDef] = []
        self.predicates: list[Predicate] = []
        self.concatenations: list[tuple[Operand, Operand]] = []
        self.target_table: Optional[str] = None
        self.dropped_columns: list[str] = []
        self.dropped_constraints: list[str] = []
        self.dropped_tables: list[str] = []
        self.dropped_indexes: list[str] = []
        self.wildcard = False
        self.join_count = 0

    # ------------------------------------------------------------------ tokens

    def _index_parens(self) -> None:
        stack: list[int] = []
        for i, token in enumerate(self.tokens):
            self.parent.append(stack[-1] if stack else -1)
            if token.type is TokenType.PUNCTUATION and token.text == "(":
                self.depth.append(len(stack))
                stack.append(i)
            elif token.type is TokenType.PUNCTUATION and token.text == ")":
                if stack:
                    opener = stack.pop()
                    self.match[opener] = i
                    self.match[i] = opener
                    self.parent[i] = stack[-1] if stack else -1
                else:
                    self.diagnostics.append(f"unbalanced ')' at token {i}")
                self.depth.append(len(stack))
            else:
                if token.type is TokenType.UNKNOWN:
                    self.diagnostics.append(f"unrecognized input {token.text[:20]!r}")
                self.depth.append(len(stack))
        if stack:
            self.diagnostics.append(f"{len(stack)} unclosed '('")

    def text_at(self, i: Optional[int]) -> str:
        return self.tokens[i].text if i is not None and 0 <= i < self.n else ""

    def word(self, i: Optional[int]) -> str:
        if i is None or not 0 <= i < self.n or not self.tokens[i].is_word:
            return ""
        return self.tokens[i].upper

    def is_kw(self, i: Optional[int], *words: str) -> bool:
        return (
            i is not None and 0 <= i < self.n
            and self.tokens[i].type is TokenType.KEYWORD
            and self.tokens[i].upper in words
        )

    def is_punct(self, i: Optional[int], text: str) -> bool:
        return (
            i is not None and 0 <= i < self.n
            and self.tokens[i].type is TokenType.PUNCTUATION
            and self.tokens[i].text == text
        )

    def is_ident(self, i: Optional[int]) -> bool:
        return i is not None and 0 <= i < self.n and self.tokens[i].type is TokenType.IDENTIFIER

    def next_sig(self, i: int, limit: Optional[int] = None) -> Optional[int]:
        end = self.n if limit is None else limit
        for j in range(i + 1, end):
            if self.tokens[j].is_significant:
                return j
        return None

    def first_sig(self, i: int, limit: Optional[int] = None) -> Optional[int]:
        if i < self.n and self.tokens[i].is_significant and (limit is None or i < limit):
            return i
        return self.next_sig(i, limit)

    def prev_sig(self, i: int, floor: int = 0) -> Optional[int]:
        for j in range(i - 1, floor - 1, -1):
            if self.tokens[j].is_significant:
                return j
        return None

    def close_of(self, opener: int) -> int:
        return self.match.get(opener, self.n - 1)

    def trimmed(self, start: int, end: int) -> Optional[tuple[int, int]]:
        first = self.first_sig(start, end)
        if first is None:
            return None
        last = self.prev_sig(end, first)
        return first, (last if last is not None else first) + 1

    def text_of(self, start: int, end: int) -> str:
        return "".join(t.text for t in self.tokens[start:end]).strip()

    def add_clause(self, role: ClauseRole, start: int, end: int) -> None:
        bounds = self.trimmed(start, end)
        if bounds:
            self.clauses.setdefault(role, []).append(Span(*bounds))

    def split_commas(self, start: int, end: int) -> list[tuple[int, int]]:
        parts: list[tuple[int, int]] = []
        j = cut = start
        while j < end:
            if self.is_punct(j, "("):
                j = self.close_of(j) + 1
                continue
            if self.is_punct(j, ","):
                parts.append((cut, j))
                cut = j + 1
            j += 1
        parts.append((cut, end))
        return [b for b in (self.trimmed(s, e) for s, e in parts) if b]

    def read_name(self, i: Optional[int]) -> Optional[tuple[list[str], int]]:
        """Read ``a.b.c`` starting at ``i``; returns the parts and the last index."""
        if not self.is_ident(i):
            return None
        parts = [self.tokens[i].name]
        last = i
        while True:
            dot = self.next_sig(last)
            if not self.is_punct(dot, "."):
                break
            nxt = self.next_sig(dot)
            if self.is_ident(nxt) or self.text_at(nxt) == "*":
                parts.append(self.tokens[nxt].name)
                last = nxt
            else:
                break
        return parts, last

    def paren_names(self, opener: int) -> list[str]:
        close = self.close_of(opener)
        names = []
        for s, e in self.split_commas(opener + 1, close):
            nxt = self.next_sig(s, e)
            plain = nxt is None or self.word(nxt) in ("ASC", "DESC", "COLLATE")
            # "col(10)" prefix-length entries
            if self.is_punct(nxt, "("):
                inner = self.trimmed(nxt + 1, self.close_of(nxt))
                plain = inner is not None and inner[1] - inner[0] == 1 and self.tokens[inner[0]].type is TokenType.LITERAL
            if self.tokens[s].is_word and plain:
                names.append(self.tokens[s].name)
            else:
                names.append(self.text_of(s, e))
        return names

    # ---------------------------------------------------------- classification

    def classify(self) -> tuple[StatementKind, Optional[int]]:
        head = self.first_sig(0)
        while self.is_punct(head, "("):
            head = self.next_sig(head)
        lead = self.word(head)
        if lead == "SELECT":
            return StatementKind.SELECT, head
        if lead == "WITH":
            return self.classify_with(head)
        if lead in ("INSERT", "REPLACE"):
            return StatementKind.INSERT, head
        if lead == "UPDATE":
            return StatementKind.UPDATE, head
        if lead == "DELETE":
            return StatementKind.DELETE, head
        if lead == "CREATE":
            j = self.next_sig(head)
            while self.word(j) in ("OR", "REPLACE", "TEMP", "TEMPORARY", "GLOBAL", "LOCAL", "UNLOGGED", "UNIQUE"):
                j = self.next_sig(j)
            if self.word(j) == "TABLE":
                return StatementKind.CREATE_TABLE, head
            if self.word(j) == "INDEX":
                return StatementKind.CREATE_INDEX, head
            return StatementKind.OTHER, head
        if lead == "ALTER":
            if self.word(self.next_sig(head)) == "TABLE":
                return StatementKind.ALTER_TABLE, head
            return StatementKind.OTHER, head
        if lead == "DROP":
            return StatementKind.DROP, head
        return StatementKind.OTHER, head

    def classify_with(self, head: int) -> tuple[StatementKind, Optional[int]]:
        j = self.next_sig(head)
        if self.word(j) == "RECURSIVE":
            j = self.next_sig(j)
        # WITH name [(cols)] AS [NOT] [MATERIALIZED] ( ... ) [, ...]
        while j is not None and self.tokens[j].is_word:
            self.cte_names.add(canonical(self.tokens[j].name))
            self.consumed.add(j)
            k = self.next_sig(j)
            if self.is_punct(k, "("):
                self.consumed.update(range(k, self.close_of(k) + 1))
                k = self.next_sig(self.close_of(k))
            if self.word(k) != "AS":
                break
            k = self.next_sig(k)
            while self.word(k) in ("NOT", "MATERIALIZED"):
                k = self.next_sig(k)
            if not self.is_punct(k, "("):
                break
            k = self.next_sig(self.close_of(k))
            if not self.is_punct(k, ","):
                j = k
                break
            j = self.next_sig(k)
        lead = self.word(j)
        kinds = {
            "SELECT": StatementKind.SELECT,
            "INSERT": StatementKind.INSERT,
            "REPLACE": StatementKind.INSERT,
            "UPDATE": StatementKind.UPDATE,
            "DELETE": StatementKind.DELETE,
        }
        if lead in kinds:
            return kinds[lead], j
        return StatementKind.OTHER, head

    # ------------------------------------------------------------ table items

    def parse_table_item(self, after: int) -> tuple[Optional[TableRef], int]:
        """Read one FROM/JOIN item following index ``after``; returns its last index."""
        j = self.next_sig(after)
        while self.word(j) in ("LATERAL", "ONLY"):
            j = self.next_sig(j)
        if j is None:
            return None, after
        if self.is_punct(j, "("):
            last = self.close_of(j)
            return None, self.read_alias(last)[1]
        named = self.read_name(j)
        if named is None:
            return None, j
        parts, last = named
        if self.is_punct(self.next_sig(last), "("):
            # table-valued function
            self.consumed.update(range(j, last + 1))
            return None, self.read_alias(self.close_of(self.next_sig(last)))[1]
        self.consumed.update(range(j, last + 1))
        alias, end = self.read_alias(last)
        ref = TableRef(name=parts[-1], alias=alias, span=Span(j, end + 1))
        self.table_refs.append(ref)
        return ref, end

    def read_alias(self, last: int) -> tuple[Optional[str], int]:
        k = self.next_sig(last)
        if self.is_kw(k, "AS"):
            a = self.next_sig(k)
            if self.is_ident(a):
                self.consumed.add(a)
                return self.tokens[a].name, a
            return None, k
        if self.is_ident(k) and not self.is_punct(self.next_sig(k), "("):
            self.consumed.add(k)
            return self.tokens[k].name, k
        return None, last

    def valid_from(self, i: int) -> bool:
        opener = self.parent[i]
        if opener < 0:
            return True
        return self.word(self.next_sig(opener)) in ("SELECT", "WITH")

    def harvest_tables(self) -> None:
        for i in range(self.n):
            if self.is_kw(i, "FROM") and self.valid_from(i):
                count = 0
                cursor = i
                while True:
                    _, last = self.parse_table_item(cursor)
                    count += 1
                    comma = self.next_sig(last)
                    if self.is_punct(comma, ",") and self.depth[comma] == self.depth[i]:
                        cursor = comma
                        continue
                    break
                self.join_count += count - 1
            elif self.is_kw(i, "JOIN", "STRAIGHT_JOIN"):
                self.join_count += 1
                self.parse_table_item(i)

    # --------------------------------------------------------------- clauses

    def scan_clauses(self, start: int, markers: list[tuple[Optional[ClauseRole], int]], seen_from: bool = False) -> None:
        """Cut top-level clauses starting at ``start`` and record their spans."""
        level = self.depth[start] if start < self.n else 0
        has_limit = False
        j = start
        stop = self.n
        while j < self.n:
            token = self.tokens[j]
            if self.is_punct(j, "("):
                j = self.close_of(j) + 1
                continue
            if self.is_punct(j, ")") and self.depth[j] < level or self.is_punct(j, ";"):
                stop = j
                break
            if token.type is TokenType.KEYWORD and self.depth[j] == level:
                upper = token.upper
                nxt = self.next_sig(j)
                if upper == "FROM":
                    markers.append((ClauseRole.FROM, j))
                    seen_from = True
                elif upper in JOIN_START and seen_from and not self.is_punct(nxt, "("):
                    if self.word(self.prev_sig(j)) not in JOIN_MODIFIERS:
                        markers.append((ClauseRole.JOINS, j))
                elif upper == "WHERE":
                    markers.append((ClauseRole.WHERE, j))
                elif upper == "GROUP" and self.word(nxt) == "BY":
                    markers.append((ClauseRole.GROUP_BY, j))
                elif upper == "HAVING":
                    markers.append((ClauseRole.HAVING, j))
                elif upper == "ORDER" and self.word(nxt) == "BY":
                    markers.append((ClauseRole.ORDER_BY, j))
                elif upper in ("LIMIT", "OFFSET", "FETCH") and not has_limit:
                    markers.append((ClauseRole.LIMIT, j))
                    has_limit = True
                elif upper == "SET" and self.kind is StatementKind.UPDATE:
                    markers.append((ClauseRole.SET, j))
                elif upper in CLAUSE_STOP or (
                    upper == "ON" and self.kind is StatementKind.INSERT and self.word(nxt) in ("CONFLICT", "DUPLICATE")
                ):
                    stop = j
                    break
            j += 1
        for index, (role, begin) in enumerate(markers):
            end = markers[index + 1][1] if index + 1 < len(markers) else stop
            if role is not None:
                self.add_clause(role, begin, end)

    def annotate_select(self, head: int) -> None:
        j = self.next_sig(head)
        while j is not None:
            modifier = self.word(j)
            if modifier in ("DISTINCT", "ALL"):
                j = self.next_sig(j)
            elif modifier == "ON" and self.is_punct(self.next_sig(j), "("):
                j = self.next_sig(self.close_of(self.next_sig(j)))
            elif modifier == "TOP":
                j = self.next_sig(self.next_sig(j))
            else:
                break
        if j is None:
            return
        self.scan_clauses(j, [(ClauseRole.PROJECTION, j)])
        for span in self.clauses.get(ClauseRole.PROJECTION, []):
            for s, e in self.split_commas(span.start, span.end):
                items = [k for k in range(s, e) if self.tokens[k].is_significant]
                texts = [self.tokens[k].text for k in items]
                if texts == ["*"] or (len(texts) == 3 and texts[1:] == [".", "*"]):
                    self.wildcard = True
                    self.consumed.update(items)
                # projection alias
                if len(items) >= 2 and self.word(items[-2]) == "AS":
                    self.consumed.add(items[-1])

    def annotate_insert(self, head: int) -> None:
        j = self.next_sig(head)
        while self.word(j) in ("OR", "REPLACE", "ROLLBACK", "ABORT", "FAIL", "IGNORE", "INTO", "LOW_PRIORITY", "DELAYED", "HIGH_PRIORITY"):
            if self.word(j) == "INTO":
                j = self.next_sig(j)
                break
            j = self.next_sig(j)
        named = self.read_name(j)
        if named is None:
            return
        parts, last = named
        self.consumed.update(range(j, last + 1))
        self.target_table = parts[-1]
        self.table_refs.append(TableRef(name=parts[-1], alias=None, span=Span(j, last + 1)))
        self.add_clause(ClauseRole.TARGET, j, last + 1)
        k = self.next_sig(last)
        if self.is_punct(k, "(") and self.word(self.next_sig(k)) not in ("SELECT", "WITH"):
            close = self.close_of(k)
            self.add_clause(ClauseRole.COLUMN_LIST, k, close + 1)
            for s, e in self.split_commas(k + 1, close):
                if self.is_ident(s):
                    self.consumed.add(s)
                    self.columns.append(ColumnRef(self.target_table, self.tokens[s].name))
            k = self.next_sig(close)
        if self.word(k) in ("VALUES", "DEFAULT", "VALUE"):
            self.scan_clauses(k, [(ClauseRole.VALUES, k)])
        elif self.word(k) in ("SELECT", "WITH"):
            self.annotate_select(k)

    def annotate_update(self, head: int) -> None:
        j = head
        while self.word(self.next_sig(j)) in ("ONLY", "LOW_PRIORITY", "IGNORE", "OR", "ROLLBACK", "ABORT", "REPLACE", "FAIL"):
            j = self.next_sig(j)
        ref, last = self.parse_table_item(j)
        if ref is None:
            return
        self.target_table = ref.name
        self.add_clause(ClauseRole.TARGET, ref.span.start, ref.span.end)
        start = self.next_sig(last)
        if start is not None:
            self.scan_clauses(start, [], seen_from=True)

    def annotate_delete(self, head: int) -> None:
        j = self.next_sig(head)
        if j is None:
            return
        self.scan_clauses(j, [])
        frm = j if self.is_kw(j, "FROM") else None
        if frm is not None:
            named = self.read_name(self.next_sig(frm))
            if named:
                self.target_table = named[0][-1]

    # ------------------------------------------------------------------- DDL

    def constraint_columns(self, start: int, end: int) -> tuple[str, ...]:
        names: list[str] = []
        j = start
        while j < end:
            named = self.read_name(j) if self.is_ident(j) else None
            if named is None:
                j += 1
                continue
            parts, last = named
            if not self.is_punct(self.next_sig(last), "(") and parts[-1] not in names:
                names.append(parts[-1])
            j = last + 1
        return tuple(names)

    def parse_references(self, j: Optional[int]) -> tuple[Optional[str], tuple[str, ...], Optional[int]]:
        """``REFERENCES t [(cols)]`` starting at the REFERENCES keyword."""
        named = self.read_name(self.next_sig(j)) if j is not None else None
        if named is None:
            return None, (), j
        parts, last = named
        cols: tuple[str, ...] = ()
        k = self.next_sig(last)
        if self.is_punct(k, "("):
            cols = tuple(self.paren_names(k))
            last = self.close_of(k)
        self.extra_tables.append((self.next_sig(j), parts[-1]))
        return parts[-1], cols, last

    def parse_column_def(self, s: int, e: int, table: Optional[str]) -> None:
        name = self.tokens[s].name
        type_start = self.next_sig(s, e)
        type_end = type_start
        j = type_start
        while j is not None and (self.is_ident(j) or self.is_kw(j, *TYPE_KEYWORDS)) and self.word(j) not in TYPE_STOP:
            type_end = j + 1
            nxt = self.next_sig(j, e)
            if self.is_punct(nxt, "("):
                type_end = self.close_of(nxt) + 1
                nxt = self.next_sig(self.close_of(nxt), e)
            j = nxt
        if self.word(j) in ("WITH", "WITHOUT") and self.word(self.next_sig(j, e)) == "TIME":
            zone = self.next_sig(self.next_sig(j, e), e)
            if self.word(zone) == "ZONE":
                type_end = zone + 1
                j = self.next_sig(zone, e)
        declared = " ".join(self.text_of(type_start, type_end).split()) if type_start is not None and type_end else ""
        nullable = True
        pending_name: Optional[str] = None
        span = Span(s, e)
        while j is not None and j < e:
            upper = self.word(j)
            nxt = self.next_sig(j, e)
            if self.is_punct(j, "("):
                j = self.next_sig(self.close_of(j), e)
                continue
            if upper == "CONSTRAINT" and nxt is not None:
                pending_name = self.tokens[nxt].name
                j = self.next_sig(nxt, e)
                continue
            if upper == "NOT" and self.word(nxt) == "NULL":
                nullable = False
                self.constraints.append(ConstraintDecl(ConstraintKind.NOT_NULL, (name,), table, pending_name, span=span))
                pending_name = None
                j = self.next_sig(nxt, e)
                continue
            if upper == "PRIMARY" and self.word(nxt) == "KEY":
                nullable = False
                self.constraints.append(ConstraintDecl(ConstraintKind.PRIMARY_KEY, (name,), table, pending_name, span=span))
                pending_name = None
                j = self.next_sig(nxt, e)
                continue
            if upper == "UNIQUE":
                self.constraints.append(ConstraintDecl(ConstraintKind.UNIQUE, (name,), table, pending_name, span=span))
                pending_name = None
            elif upper == "REFERENCES":
                target, cols, last = self.parse_references(j)
                if target:
                    self.constraints.append(
                        ConstraintDecl(ConstraintKind.FOREIGN_KEY, (name,), table, pending_name, target, cols, span=span)
                    )
                pending_name = None
                j = self.next_sig(last, e) if last is not None else None
                continue
            elif upper == "CHECK" and self.is_punct(nxt, "("):
                close = self.close_of(nxt)
                self.constraints.append(
                    ConstraintDecl(
                        ConstraintKind.CHECK,
                        self.constraint_columns(nxt + 1, close) or (name,),
                        table,
                        pending_name,
                        expression_text=self.text_of(nxt + 1, close),
                        span=span,
                    )
                )
                pending_name = None
                j = self.next_sig(close, e)
                continue
            elif upper == "DEFAULT":
                k = nxt
                if self.text_at(k) in ("-", "+"):
                    k = self.next_sig(k, e)
                if self.is_ident(k) and self.is_punct(self.next_sig(k, e), "("):
                    k = self.close_of(self.next_sig(k, e))
                elif self.is_punct(k, "("):
                    k = self.close_of(k)
                j = self.next_sig(k, e) if k is not None else None
                continue
            j = nxt
        self.column_defs.append(ColumnDef(table, name, declared, nullable, span))
        self.columns.append(ColumnRef(table, name))

    def parse_table_element(self, s: int, e: int, table: Optional[str]) -> ClauseRole:
        span = Span(s, e)
        name: Optional[str] = None
        j: Optional[int] = s
        if self.word(j) == "CONSTRAINT":
            k = self.next_sig(j, e)
            name = self.tokens[k].name if k is not None else None
            j = self.next_sig(k, e) if k is not None else None
        upper = self.word(j)
        nxt = self.next_sig(j, e) if j is not None else None
        if upper == "PRIMARY":
            opener = self.next_sig(nxt, e) if self.word(nxt) == "KEY" else nxt
            cols = tuple(self.paren_names(opener)) if self.is_punct(opener, "(") else ()
            self.constraints.append(ConstraintDecl(ConstraintKind.PRIMARY_KEY, cols, table, name, span=span))
        elif upper == "FOREIGN":
            opener = self.next_sig(nxt, e) if self.word(nxt) == "KEY" else nxt
            while opener is not None and not self.is_punct(opener, "("):
                opener = self.next_sig(opener, e)
            cols = tuple(self.paren_names(opener)) if opener is not None else ()
            ref = self.next_sig(self.close_of(opener), e) if opener is not None else None
            if self.word(ref) == "REFERENCES":
                target, target_cols, _ = self.parse_references(ref)
                if target:
                    self.constraints.append(
                        ConstraintDecl(ConstraintKind.FOREIGN_KEY, cols, table, name, target, target_cols, span=span)
                    )
        elif upper == "UNIQUE":
            opener = nxt
            while opener is not None and not self.is_punct(opener, "("):
                opener = self.next_sig(opener, e)
            cols = tuple(self.paren_names(opener)) if opener is not None else ()
            self.constraints.append(ConstraintDecl(ConstraintKind.UNIQUE, cols, table, name, span=span))
        elif upper == "CHECK" and self.is_punct(nxt, "("):
            close = self.close_of(nxt)
            self.constraints.append(
                ConstraintDecl(
                    ConstraintKind.CHECK,
                    self.constraint_columns(nxt + 1, close),
                    table,
                    name,
                    expression_text=self.text_of(nxt + 1, close),
                    span=span,
                )
            )
        elif upper in ("KEY", "INDEX"):
            index_name = None
            opener = nxt
            if opener is not None and not self.is_punct(opener, "("):
                index_name = self.tokens[opener].name
                opener = self.next_sig(opener, e)
            if self.is_punct(opener, "("):
                columns = tuple(self.paren_names(opener))
                self.index_defs.append(IndexDef(index_name, table, columns))
                self.columns.extend(ColumnRef(table, column) for column in columns)
        for decl in self.constraints:
            if decl.span == span and decl.table == table:
                for column in decl.columns:
                    self.columns.append(ColumnRef(table, column))
                if decl.target_table:
                    for column in decl.target_columns:
                        self.columns.append(ColumnRef(decl.target_table, column))
        return ClauseRole.CONSTRAINT_LIST

    def read_table_name(self, j: Optional[int]) -> Optional[int]:
        """Consume ``[IF [NOT] EXISTS] [ONLY] name`` and set the target table."""
        while self.word(j) in ("IF", "NOT", "EXISTS", "ONLY"):
            j = self.next_sig(j)
        named = self.read_name(j)
        if named is None:
            return None
        parts, last = named
        self.target_table = parts[-1]
        self.extra_tables.append((j, parts[-1]))
        self.consumed.update(range(j, last + 1))
        self.add_clause(ClauseRole.TARGET, j, last + 1)
        return last

    def annotate_create_table(self, head: int) -> None:
        j = self.next_sig(head)
        while self.word(j) != "TABLE" and j is not None:
            j = self.next_sig(j)
        last = self.read_table_name(self.next_sig(j) if j is not None else None)
        if last is None:
            return
        k = self.next_sig(last)
        if self.is_punct(k, "("):
            close = self.close_of(k)
            for s, e in self.split_commas(k + 1, close):
                if self.word(s) in TABLE_ELEMENT_START:
                    role = self.parse_table_element(s, e, self.target_table)
                elif self.tokens[s].is_word:
                    self.parse_column_def(s, e, self.target_table)
                    role = ClauseRole.COLUMN_LIST
                else:
                    continue
                self.add_clause(role, s, e)
            k = self.next_sig(close)
        if self.word(k) == "AS":
            k = self.next_sig(k)
            if self.word(k) in ("SELECT", "WITH"):
                self.annotate_select(k)

    def annotate_alter_table(self, head: int) -> None:
        j = self.next_sig(self.next_sig(head))
        last = self.read_table_name(j)
        if last is None:
            return
        table = self.target_table
        for s, e in self.split_commas(last + 1, self.end):
            if self.is_punct(s, ";"):
                continue
            self.add_clause(ClauseRole.ACTIONS, s, e)
            action = self.word(s)
            k = self.next_sig(s, e)
            if action == "ADD":
                if self.word(k) == "COLUMN":
                    k = self.next_sig(k, e)
                while self.word(k) in ("IF", "NOT", "EXISTS"):
                    k = self.next_sig(k, e)
                if k is None:
                    continue
                if self.word(k) in TABLE_ELEMENT_START:
                    self.parse_table_element(k, e, table)
                elif self.tokens[k].is_word:
                    self.parse_column_def(k, e, table)
            elif action == "DROP":
                target = self.word(k)
                if target in ("COLUMN", "CONSTRAINT", "INDEX", "KEY", "FOREIGN"):
                    k = self.next_sig(k, e)
                    if target == "FOREIGN" and self.word(k) == "KEY":
                        k = self.next_sig(k, e)
                while self.word(k) in ("IF", "EXISTS"):
                    k = self.next_sig(k, e)
                if target == "PRIMARY":
                    self.dropped_constraints.append("PRIMARY KEY")
                    continue
                if k is None or not self.tokens[k].is_word:
                    continue
                dropped = self.tokens[k].name
                if target in ("CONSTRAINT", "FOREIGN"):
                    self.dropped_constraints.append(dropped)
                elif target in ("INDEX", "KEY"):
                    self.dropped_indexes.append(dropped)
                else:
                    self.dropped_columns.append(dropped)
                    self.columns.append(ColumnRef(table, dropped))

    def annotate_create_index(self, head: int) -> None:
        unique = False
        j = self.next_sig(head)
        while self.word(j) in ("UNIQUE", "INDEX", "CONCURRENTLY", "IF", "NOT", "EXISTS", "FULLTEXT", "SPATIAL"):
            unique = unique or self.word(j) == "UNIQUE"
            j = self.next_sig(j)
        name = None
        if j is not None and self.tokens[j].is_word and self.word(j) != "ON":
            name = self.tokens[j].name
            self.consumed.add(j)
            j = self.next_sig(j)
        while self.word(j) == "USING":
            j = self.next_sig(self.next_sig(j))
        table = None
        if self.word(j) == "ON":
            last = self.read_table_name(self.next_sig(j))
            table = self.target_table
            j = self.next_sig(last) if last is not None else None
        while self.word(j) == "USING":
            j = self.next_sig(self.next_sig(j))
        if not self.is_punct(j, "("):
            return
        close = self.close_of(j)
        self.add_clause(ClauseRole.INDEX_COLUMNS, j, close + 1)
        columns = tuple(self.paren_names(j))
        self.index_defs.append(IndexDef(name, table, columns, unique))
        for column in columns:
            self.columns.append(ColumnRef(table, column))

    def annotate_drop(self, head: int) -> None:
        j = self.next_sig(head)
        target = self.word(j)
        if target not in ("TABLE", "INDEX"):
            return
        j = self.next_sig(j)
        while self.word(j) in ("IF", "EXISTS", "CONCURRENTLY"):
            j = self.next_sig(j)
        while j is not None:
            named = self.read_name(j)
            if named is None:
                break
            parts, last = named
            (self.dropped_tables if target == "TABLE" else self.dropped_indexes).append(parts[-1])
            if target == "TABLE":
                self.extra_tables.append((j, parts[-1]))
            j = self.next_sig(last)
            if self.word(j) == "ON" and target == "INDEX":
                last = self.read_table_name(self.next_sig(j))
                j = self.next_sig(last) if last is not None else None
            if not self.is_punct(j, ","):
                break
            j = self.next_sig(j)

    # ------------------------------------------------------------ predicates

    def resolve(self, qualifier: str) -> str:
        key = canonical(qualifier)
        for ref in self.table_refs:
            if ref.alias and canonical(ref.alias) == key:
                return ref.name
        for ref in self.table_refs:
            if canonical(ref.name) == key:
                return ref.name
        return qualifier

    def default_table(self) -> Optional[str]:
        names = {canonical(ref.name): ref.name for ref in self.table_refs}
        if len(names) == 1:
            return next(iter(names.values()))
        if self.target_table and not names:
            return self.target_table
        return None

    def column_chain(self, j: int) -> Optional[tuple[ColumnRef, int]]:
        """Column reference starting at ``j``, or None when ``j`` starts something else."""
        if j in self.consumed or not self.is_ident(j):
            return None
        prev = self.prev_sig(j)
        if self.is_punct(prev, ".") or self.text_at(prev) == "::" or self.is_kw(prev, "AS"):
            return None
        named = self.read_name(j)
        if named is None:
            return None
        parts, last = named
        nxt = self.next_sig(last)
        if parts[-1] == "*" or self.is_punct(nxt, "("):
            return None
        if len(parts) == 1 and nxt is not None and self.tokens[nxt].type is TokenType.LITERAL and self.tokens[nxt].text.startswith("'"):
            return None
        if any(k in self.consumed for k in range(j, last + 1) if self.tokens[k].is_significant):
            return None
        if len(parts) == 1:
            return ColumnRef(self.default_table(), parts[0]), last
        return ColumnRef(self.resolve(parts[-2]), parts[-1]), last

    def column_refs_in(self, start: int, end: int) -> list[ColumnRef]:
        refs = []
        j = start
        while j < end:
            found = self.column_chain(j)
            if found:
                refs.append(found[0])
                j = found[1] + 1
            else:
                j += 1
        return refs

    def operand(self, start: int, end: int) -> Optional[Operand]:
        bounds = self.trimmed(start, end)
        if bounds is None:
            return None
        s, e = bounds
        refs = self.column_refs_in(s, e)
        text = self.text_of(s, e)
        single = self.column_chain(s)
        if single and single[1] == e - 1:
            return Operand(OperandKind.COLUMN, text, Span(s, e), single[0], (single[0],))
        has_names = any(self.is_ident(k) for k in range(s, e))
        kind = OperandKind.EXPRESSION if has_names else OperandKind.LITERAL
        return Operand(kind, text, Span(s, e), None, tuple(refs))

    def split_conditions(self, start: int, end: int, negated: bool = False) -> list[tuple[int, int, bool]]:
        bounds = self.trimmed(start, end)
        if bounds is None:
            return []
        s, e = bounds
        if self.is_kw(s, "NOT") and not self.is_kw(self.next_sig(s, e), "EXISTS"):
            negated = not negated
            nxt = self.next_sig(s, e)
            if nxt is None:
                return []
            s = nxt
        if self.is_punct(s, "(") and self.match.get(s) == e - 1:
            if self.word(self.next_sig(s, e)) in ("SELECT", "WITH"):
                return []
            return self.split_conditions(s + 1, e - 1, negated)
        parts: list[tuple[int, int]] = []
        between = False
        cut = s
        j = s
        while j < e:
            if self.is_punct(j, "("):
                j = self.close_of(j) + 1
                continue
            upper = self.word(j) if self.tokens[j].type is TokenType.KEYWORD else ""
            if upper == "BETWEEN":
                between = True
            elif upper == "AND" and between:
                between = False
            elif upper in ("AND", "OR"):
                parts.append((cut, j))
                cut = j + 1
            j += 1
        if not parts:
            return [(s, e, negated)]
        parts.append((cut, e))
        atoms: list[tuple[int, int, bool]] = []
        for ps, pe in parts:
            atoms.extend(self.split_conditions(ps, pe, negated))
        return atoms

    def make_predicate(self, s: int, e: int, negated: bool, role: ClauseRole) -> Optional[Predicate]:
        j = s
        not_at: Optional[int] = None
        while j < e:
            if self.is_punct(j, "("):
                j = self.close_of(j) + 1
                continue
            token = self.tokens[j]
            op: Optional[str] = None
            op_end = j + 1
            if token.type is TokenType.OPERATOR and token.text in COMPARISON_OPERATORS:
                op = token.text
                if op in ("~", "!~") and self.text_at(j + 1) == "*":
                    op += "*"
                    op_end = j + 2
            elif token.type is TokenType.KEYWORD:
                upper = token.upper
                if upper == "NOT":
                    not_at = j
                elif upper in PATTERN_WORDS or upper in ("IN", "BETWEEN"):
                    op = upper
                elif upper == "SIMILAR" and self.word(self.next_sig(j, e)) == "TO":
                    op = "SIMILAR TO"
                    op_end = self.next_sig(j, e) + 1
                elif upper == "IS":
                    op = "IS"
                    nxt = self.next_sig(j, e)
                    if self.is_kw(nxt, "NOT"):
                        negated = not negated
                        op_end = nxt + 1
            if op is not None:
                left_end = j
                if not_at is not None and op in PATTERN_WORDS | {"IN", "BETWEEN", "SIMILAR TO"}:
                    negated = not negated
                    left_end = not_at
                left = self.operand(s, left_end)
                right = self.operand(op_end, e)
                if left is None or right is None:
                    return None
                return Predicate(op, left, right, role, Span(s, e), negated)
            j += 1
        return None

    def region_end(self, i: int) -> int:
        level = self.depth[i]
        j = i + 1
        while j < self.n:
            if self.is_punct(j, "("):
                j = self.close_of(j) + 1
                continue
            if self.is_punct(j, ")") or self.is_punct(j, ";"):
                return j
            token = self.tokens[j]
            if token.type is TokenType.KEYWORD and self.depth[j] == level and token.upper in REGION_BOUNDARY:
                if not (token.upper in JOIN_START and self.is_punct(self.next_sig(j), "(")):
                    return j
            j += 1
        return self.n

    def joined_before(self, i: int) -> bool:
        level = self.depth[i]
        for j in range(i - 1, -1, -1):
            if self.depth[j] < level:
                return False
            if self.depth[j] == level and self.word(j) in ("JOIN", "STRAIGHT_JOIN"):
                return True
        return False

    def harvest_predicates(self) -> None:
        roles = {"WHERE": ClauseRole.WHERE, "HAVING": ClauseRole.HAVING, "ON": ClauseRole.JOINS}
        for i in range(self.n):
            if self.tokens[i].type is not TokenType.KEYWORD or self.tokens[i].upper not in roles:
                continue
            if self.tokens[i].upper == "ON" and not self.joined_before(i):
                continue
            role = roles[self.tokens[i].upper]
            for s, e, negated in self.split_conditions(i + 1, self.region_end(i)):
                predicate = self.make_predicate(s, e, negated, role)
                if predicate is not None:
                    self.predicates.append(predicate)

    def primary_before(self, j: int) -> Optional[tuple[int, int]]:
        k = self.prev_sig(j)
        if k is None:
            return None
        if self.is_punct(k, ")"):
            opener = self.match.get(k)
            if opener is None:
                return None
            start = opener
            p = self.prev_sig(opener)
            if self.is_ident(p):
                start = p
            return start, k + 1
        if self.is_ident(k) or self.text_at(k) == "*":
            start = k
            while True:
                dot = self.prev_sig(start)
                before = self.prev_sig(dot) if self.is_punct(dot, ".") else None
                if self.is_ident(before):
                    start = before
                else:
                    break
            return start, k + 1
        if self.tokens[k].type is TokenType.LITERAL:
            return k, k + 1
        return None

    def primary_after(self, j: int) -> Optional[tuple[int, int]]:
        k = self.next_sig(j)
        if k is None:
            return None
        if self.is_punct(k, "("):
            return k, self.close_of(k) + 1
        if self.is_ident(k):
            parts, last = self.read_name(k)
            nxt = self.next_sig(last)
            if self.is_punct(nxt, "("):
                return k, self.close_of(nxt) + 1
            return k, last + 1
        if self.tokens[k].type is TokenType.LITERAL:
            return k, k + 1
        return None

    def harvest_concatenations(self) -> None:
        for j in range(self.n):
            if self.tokens[j].type is TokenType.OPERATOR and self.tokens[j].text == "||":
                before, after = self.primary_before(j), self.primary_after(j)
                if before and after:
                    left, right = self.operand(*before), self.operand(*after)
                    if left and right:
                        self.concatenations.append((left, right))

    # ------------------------------------------------------------------- run

    def run(self) -> AnnotatedStatement:
        self.kind, head = self.classify()
        if head is not None:
            if self.kind in DML_KINDS:
                self.harvest_tables()
            dispatch = {
                StatementKind.SELECT: self.annotate_select,
                StatementKind.INSERT: self.annotate_insert,
                StatementKind.UPDATE: self.annotate_update,
                StatementKind.DELETE: self.annotate_delete,
                StatementKind.CREATE_TABLE: self.annotate_create_table,
                StatementKind.ALTER_TABLE: self.annotate_alter_table,
                StatementKind.CREATE_INDEX: self.annotate_create_index,
                StatementKind.DROP: self.annotate_drop,
            }
            if self.kind in dispatch:
                dispatch[self.kind](head)
            if self.kind is StatementKind.CREATE_TABLE and self.clauses.get(ClauseRole.PROJECTION):
                self.harvest_tables()
            if self.kind in DML_KINDS or self.clauses.get(ClauseRole.PROJECTION):
                self.harvest_predicates()
                self.harvest_concatenations()
                self.columns.extend(self.column_refs_in(0, self.n))
        return self.build()

    def build(self) -> AnnotatedStatement:
        named: list[tuple[int, str]] = [(ref.span.start, ref.name) for ref in self.table_refs]
        named.extend(self.extra_tables)
        tables: dict[str, str] = {}
        for _, name in sorted(named, key=lambda item: item[0]):
            key = canonical(name)
            if key not in self.cte_names:
                tables.setdefault(key, name)
        columns: dict[tuple[str, str], ColumnRef] = {}
        for ref in self.columns:
            columns.setdefault(ref.key, ref)
        distinct = any(t.type is TokenType.KEYWORD and t.upper == "DISTINCT" for t in self.tokens)
        return AnnotatedStatement(
            source_id=self.raw.source_id,
            ordinal=self.raw.ordinal,
            kind=self.kind,
            tokens=tuple(self.tokens),
            clauses={role: tuple(spans) for role, spans in self.clauses.items()},
            tables_referenced=tuple(tables.values()),
            columns_referenced=tuple(columns.values()),
            constraints=tuple(self.constraints),
            column_defs=tuple(self.column_defs),
            index_defs=tuple(self.index_defs),
            table_refs=tuple(self.table_refs),
            predicates=tuple(self.predicates),
            concatenations=tuple(self.concatenations),
            target_table=self.target_table,
            dropped_columns=tuple(self.dropped_columns),
            dropped_constraints=tuple(self.dropped_constraints),
            dropped_tables=tuple(self.dropped_tables),
            dropped_indexes=tuple(self.dropped_indexes),
            has_wildcard_projection=self.wildcard,
            join_count=self.join_count,
            distinct_present=distinct,
            diagnostics=tuple(self.diagnostics),
        )


def _opaque(raw: RawStatement, tokens: tuple[Token, ...], reason: str) -> AnnotatedStatement:
    return AnnotatedStatement(
        source_id=raw.source_id,
        ordinal=raw.ordinal,
        kind=StatementKind.OTHER,
        tokens=tokens,
        clauses={},
        diagnostics=(reason,),
    )


def parse(stmt: RawStatement) -> AnnotatedStatement:
    """Annotate one statement. Never raises."""
    try:
        tokens = tokenize(stmt.text)
    except Exception as e:
        log.warning("Statement could not be tokenized", source_id=stmt.source_id, error=str(e))
        return _opaque(stmt, (Token(TokenType.UNKNOWN, stmt.text),), f"tokenizer failure: {e}")
    try:
        return _Annotator(stmt, tokens).run()
    except Exception as e:
        log.warning("Statement annotation failed", source_id=stmt.source_id, error=str(e))
        return _opaque(stmt, tuple(tokens), f"annotation failure: {e}")
