#include "fodot/parser.h"

#include <cctype>
#include <set>

namespace fodot {

namespace {

enum class Tok {
  kEnd,
  kIdent,
  kNumber,
  kLBrace, kRBrace, kLParen, kRParen, kLBracket, kRBracket,
  kComma, kColon, kDot, kDotDot, kAssign,  // :=
  kArrow,      // ->
  kLeftArrow,  // <-
  kIff, kImplies, kNot, kAnd, kOr,
  kForall, kExists, kHash, kDollar, kBacktick,
  kEq, kNe, kLt, kLe, kGt, kGe,
  kPlus, kMinus, kStar, kSlash,
  kError,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  int line = 1;
  int column = 1;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::kEnd: return "end of input";
    case Tok::kIdent: return "identifier";
    case Tok::kNumber: return "number";
    case Tok::kLBrace: return "'{'";
    case Tok::kRBrace: return "'}'";
    case Tok::kLParen: return "'('";
    case Tok::kRParen: return "')'";
    case Tok::kLBracket: return "'['";
    case Tok::kRBracket: return "']'";
    case Tok::kComma: return "','";
    case Tok::kColon: return "':'";
    case Tok::kDot: return "'.'";
    case Tok::kDotDot: return "'..'";
    case Tok::kAssign: return "':='";
    case Tok::kArrow: return "'->'";
    case Tok::kLeftArrow: return "'<-'";
    case Tok::kIff: return "'<=>'";
    case Tok::kImplies: return "'=>'";
    case Tok::kNot: return "'~'";
    case Tok::kAnd: return "'&'";
    case Tok::kOr: return "'|'";
    case Tok::kForall: return "'!'";
    case Tok::kExists: return "'?'";
    case Tok::kHash: return "'#'";
    case Tok::kDollar: return "'$'";
    case Tok::kBacktick: return "'`'";
    case Tok::kEq: return "'='";
    case Tok::kNe: return "'~='";
    case Tok::kLt: return "'<'";
    case Tok::kLe: return "'=<'";
    case Tok::kGt: return "'>'";
    case Tok::kGe: return "'>='";
    case Tok::kPlus: return "'+'";
    case Tok::kMinus: return "'-'";
    case Tok::kStar: return "'*'";
    case Tok::kSlash: return "'/'";
    case Tok::kError: return "invalid character";
  }
  return "?";
}

// Multi-byte UTF-8 operator spellings accepted as synonyms.
struct Utf8Op {
  const char* text;
  Tok kind;
};

constexpr Utf8Op kUtf8Ops[] = {
    {"\xC2\xAC", Tok::kNot},          // ¬
    {"\xE2\x88\xA7", Tok::kAnd},      // ∧
    {"\xE2\x88\xA8", Tok::kOr},       // ∨
    {"\xE2\x87\x92", Tok::kImplies},  // ⇒
    {"\xE2\x87\x94", Tok::kIff},      // ⇔
    {"\xE2\x88\x80", Tok::kForall},   // ∀
    {"\xE2\x88\x83", Tok::kExists},   // ∃
    {"\xE2\x89\xA0", Tok::kNe},       // ≠
    {"\xE2\x89\xA4", Tok::kLe},       // ≤
    {"\xE2\x89\xA5", Tok::kGe},       // ≥
    {"\xE2\x86\x90", Tok::kLeftArrow},  // ←
    {"\xE2\x86\x92", Tok::kArrow},    // →
    {"\xC3\x97", Tok::kStar},         // ×
};

constexpr const char* kElementOf = "\xE2\x88\x88";  // ∈

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = column_;
      if (pos_ >= text_.size()) {
        t.kind = Tok::kEnd;
        out.push_back(t);
        return out;
      }
      lex_one(t);
      out.push_back(std::move(t));
    }
  }

 private:
  char peek(size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance(size_t n = 1) {
    for (size_t i = 0; i < n && pos_ < text_.size(); ++i) {
      unsigned char c = static_cast<unsigned char>(text_[pos_]);
      if (c == '\n') {
        ++line_;
        column_ = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++column_;
      }
      ++pos_;
    }
  }

  void skip_space() {
    for (;;) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '/' && peek(1) == '/') {
        while (pos_ < text_.size() && peek() != '\n') advance();
        continue;
      }
      return;
    }
  }

  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  void lex_one(Token& t) {
    char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      t.kind = Tok::kIdent;
      t.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
      t.kind = Tok::kNumber;
      t.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    if (c == '\\' && starts_with("\\in") && !std::isalnum(static_cast<unsigned char>(peek(3)))) {
      advance(3);
      t.kind = Tok::kIdent;
      t.text = "in";
      return;
    }
    if (starts_with(kElementOf)) {
      advance(3);
      t.kind = Tok::kIdent;
      t.text = "in";
      return;
    }
    for (const Utf8Op& op : kUtf8Ops) {
      if (starts_with(op.text)) {
        t.kind = op.kind;
        t.text = op.text;
        advance(std::string_view(op.text).size());
        return;
      }
    }
    struct Ascii {
      const char* text;
      Tok kind;
    };
    static constexpr Ascii kOps[] = {
        {"<=>", Tok::kIff}, {":=", Tok::kAssign}, {"->", Tok::kArrow}, {"<-", Tok::kLeftArrow},
        {"=>", Tok::kImplies}, {"=<", Tok::kLe}, {">=", Tok::kGe}, {"~=", Tok::kNe},
        {"..", Tok::kDotDot}, {"{", Tok::kLBrace}, {"}", Tok::kRBrace}, {"(", Tok::kLParen},
        {")", Tok::kRParen}, {"[", Tok::kLBracket}, {"]", Tok::kRBracket}, {",", Tok::kComma},
        {":", Tok::kColon}, {".", Tok::kDot}, {"~", Tok::kNot}, {"&", Tok::kAnd},
        {"|", Tok::kOr}, {"!", Tok::kForall}, {"?", Tok::kExists}, {"#", Tok::kHash},
        {"$", Tok::kDollar}, {"`", Tok::kBacktick}, {"=", Tok::kEq}, {"<", Tok::kLt},
        {">", Tok::kGt}, {"+", Tok::kPlus}, {"-", Tok::kMinus}, {"*", Tok::kStar},
        {"/", Tok::kSlash},
    };
    for (const Ascii& op : kOps) {
      if (starts_with(op.text)) {
        t.kind = op.kind;
        t.text = op.text;
        advance(std::string_view(op.text).size());
        return;
      }
    }
    t.kind = Tok::kError;
    t.text = std::string(1, c);
    advance();
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

// Thrown internally to unwind to the nearest recovery point.
struct Bail {};

const std::set<std::string> kKeywords = {"vocabulary", "theory", "structure", "type", "in",
                                         "lambda", "if", "then", "else", "true", "false"};

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(Lexer(text).run()) {}

  KnowledgeBase parse_kb() {
    KnowledgeBase kb;
    while (!at(Tok::kEnd)) {
      try {
        parse_block(kb);
      } catch (const Bail&) {
        // Resynchronize on the next block keyword.
        while (!at(Tok::kEnd) && !at_keyword("vocabulary") && !at_keyword("theory") &&
               !at_keyword("structure")) {
          next();
        }
      }
    }
    finish();
    return kb;
  }

  ExprPtr parse_single_expr() {
    ExprPtr e;
    try {
      e = parse_expr();
      if (!at(Tok::kEnd)) fail({"end of input"});
    } catch (const Bail&) {
    }
    finish();
    return e;
  }

 private:
  const Token& cur() const { return tokens_[pos_]; }
  const Token& ahead(size_t n) const {
    return tokens_[std::min(pos_ + n, tokens_.size() - 1)];
  }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_keyword(const char* kw) const { return at(Tok::kIdent) && cur().text == kw; }
  Token next() {
    Token t = cur();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  bool accept_keyword(const char* kw) {
    if (!at_keyword(kw)) return false;
    next();
    return true;
  }

  SourceSpan span_here() const { return {cur().line, cur().column, cur().line, cur().column}; }

  SourceSpan span_from(const SourceSpan& start) const {
    const Token& last = tokens_[pos_ > 0 ? pos_ - 1 : 0];
    return {start.line, start.column, last.line,
            last.column + static_cast<int>(last.text.size())};
  }

  [[noreturn]] void fail(std::vector<std::string> expected, std::string message = {}) {
    Diagnostic d;
    d.span = span_here();
    if (message.empty()) {
      message = "unexpected ";
      message += at(Tok::kIdent) || at(Tok::kNumber) ? "'" + cur().text + "'" : tok_name(cur().kind);
    }
    d.message = std::move(message);
    d.expected = std::move(expected);
    diagnostics_.push_back(std::move(d));
    throw Bail{};
  }

  Token expect(Tok k) {
    if (!at(k)) fail({tok_name(k)});
    return next();
  }

  void expect_keyword(const char* kw) {
    if (!accept_keyword(kw)) fail({std::string("'") + kw + "'"});
  }

  std::string expect_name() {
    if (!at(Tok::kIdent) || kKeywords.count(cur().text)) fail({"identifier"});
    return next().text;
  }

  void finish() {
    if (!diagnostics_.empty()) throw Error(ErrorKind::kParse, diagnostics_);
  }

  // Skips to just past the next '.' at the current brace depth, or stops
  // before the closing '}' of the enclosing block.
  void recover_statement() {
    int depth = 0;
    while (!at(Tok::kEnd)) {
      if (at(Tok::kLBrace)) ++depth;
      if (at(Tok::kRBrace)) {
        if (depth == 0) return;
        --depth;
      }
      if (at(Tok::kDot) && depth == 0) {
        next();
        return;
      }
      next();
    }
  }

  void parse_block(KnowledgeBase& kb) {
    if (at_keyword("vocabulary")) {
      kb.vocabularies.push_back(parse_vocabulary());
    } else if (at_keyword("theory")) {
      kb.theories.push_back(parse_theory());
    } else if (at_keyword("structure")) {
      kb.structures.push_back(parse_structure());
    } else {
      fail({"'vocabulary'", "'theory'", "'structure'"});
    }
  }

  // `theory T:V {`; both names optional (defaults T / S and V).
  void parse_block_header(const char* default_name, std::string& name, std::string& vocab) {
    name = default_name;
    vocab = "V";
    if (at(Tok::kIdent)) name = expect_name();
    if (accept(Tok::kColon)) vocab = expect_name();
    expect(Tok::kLBrace);
  }

  Vocabulary parse_vocabulary() {
    Vocabulary v;
    v.span = span_here();
    expect_keyword("vocabulary");
    v.name = "V";
    if (at(Tok::kIdent)) v.name = expect_name();
    expect(Tok::kLBrace);
    while (!at(Tok::kRBrace) && !at(Tok::kEnd)) {
      try {
        if (at_keyword("type")) {
          TypeDecl td;
          td.span = span_here();
          next();
          td.name = expect_name();
          if (accept(Tok::kAssign)) {
            Enumeration e = parse_enumeration_body(td.name);
            e.span = td.span;
            td.constructors = std::move(e);
          }
          td.span = span_from(td.span);
          v.types.push_back(std::move(td));
        } else {
          SourceSpan start = span_here();
          std::vector<std::string> names{expect_name()};
          while (accept(Tok::kComma)) names.push_back(expect_name());
          expect(Tok::kColon);
          Signature sig = parse_signature();
          for (std::string& n : names) {
            v.symbols.push_back(SymbolDecl{std::move(n), sig, span_from(start)});
          }
        }
        accept(Tok::kDot);
      } catch (const Bail&) {
        // Declarations are newline-free; skip one token and retry.
        if (!at(Tok::kRBrace) && !at(Tok::kEnd)) next();
        while (!at(Tok::kRBrace) && !at(Tok::kEnd) && !at_keyword("type") &&
               !(at(Tok::kIdent) && (ahead(1).kind == Tok::kColon || ahead(1).kind == Tok::kComma))) {
          next();
        }
      }
    }
    expect(Tok::kRBrace);
    v.span = span_from(v.span);
    return v;
  }

  TypeRef parse_type() {
    TypeRef t;
    t.name = expect_name();
    if (t.name == "Concept" && accept(Tok::kLBracket)) {
      t.concept_signature = std::make_shared<Signature>(parse_signature());
      expect(Tok::kRBracket);
    }
    return t;
  }

  Signature parse_signature() {
    Signature s;
    if (accept(Tok::kLParen)) {
      expect(Tok::kRParen);
    } else {
      s.args.push_back(parse_type());
      while (accept(Tok::kStar)) s.args.push_back(parse_type());
    }
    expect(Tok::kArrow);
    s.result = parse_type();
    return s;
  }

  Theory parse_theory() {
    Theory t;
    t.span = span_here();
    expect_keyword("theory");
    parse_block_header("T", t.name, t.vocabulary);
    while (!at(Tok::kRBrace) && !at(Tok::kEnd)) {
      try {
        if (at(Tok::kLBrace)) {
          t.statements.emplace_back(parse_definition());
        } else {
          Axiom a;
          a.span = span_here();
          a.formula = parse_expr();
          expect(Tok::kDot);
          a.span = span_from(a.span);
          t.statements.emplace_back(std::move(a));
        }
      } catch (const Bail&) {
        recover_statement();
      }
    }
    expect(Tok::kRBrace);
    t.span = span_from(t.span);
    return t;
  }

  Definition parse_definition() {
    Definition d;
    d.span = span_here();
    expect(Tok::kLBrace);
    while (!at(Tok::kRBrace) && !at(Tok::kEnd)) {
      try {
        d.rules.push_back(parse_rule());
      } catch (const Bail&) {
        recover_statement();
      }
    }
    expect(Tok::kRBrace);
    d.span = span_from(d.span);
    return d;
  }

  Rule parse_rule() {
    Rule r;
    r.span = span_here();
    if (accept(Tok::kForall)) {
      r.binders = parse_binders();
      expect(Tok::kColon);
    }
    SourceSpan head_start = span_here();
    std::string symbol = expect_name();
    if (!at(Tok::kLParen)) fail({"'('"}, "rule head must be an applied symbol");
    r.head = make_apply(symbol, parse_args(), span_from(head_start));
    if (at(Tok::kOr) || at(Tok::kAnd) || at(Tok::kComma)) {
      fail({}, "rule head must be a single atom: disjunctive or compound heads are not allowed");
    }
    if (accept(Tok::kEq)) r.value = parse_sum();
    if (accept(Tok::kLeftArrow)) r.body = parse_expr();
    expect(Tok::kDot);
    r.span = span_from(r.span);
    return r;
  }

  std::vector<ExprPtr> parse_args() {
    std::vector<ExprPtr> args;
    expect(Tok::kLParen);
    if (!at(Tok::kRParen)) {
      args.push_back(parse_expr());
      while (accept(Tok::kComma)) args.push_back(parse_expr());
    }
    expect(Tok::kRParen);
    return args;
  }

  StructureBlock parse_structure() {
    StructureBlock s;
    s.span = span_here();
    expect_keyword("structure");
    parse_block_header("S", s.name, s.vocabulary);
    while (!at(Tok::kRBrace) && !at(Tok::kEnd)) {
      try {
        SourceSpan start = span_here();
        std::string target = expect_name();
        expect(Tok::kAssign);
        Enumeration e = parse_enumeration_body(target);
        accept(Tok::kDot);
        e.span = span_from(start);
        s.enumerations.push_back(std::move(e));
      } catch (const Bail&) {
        recover_statement();
      }
    }
    expect(Tok::kRBrace);
    s.span = span_from(s.span);
    return s;
  }

  Constant parse_constant() {
    Constant c;
    bool negative = accept(Tok::kMinus);
    if (at(Tok::kNumber)) {
      Token t = next();
      c.kind = Constant::Kind::kNumber;
      c.number = *parse_number(t.text);
      if (negative) c.number = -c.number;
      c.is_real = t.text.find('.') != std::string::npos;
      return c;
    }
    if (negative) fail({"number"});
    if (at_keyword("true") || at_keyword("false")) {
      c.kind = Constant::Kind::kBool;
      c.boolean = next().text == "true";
      return c;
    }
    accept(Tok::kBacktick);
    c.kind = Constant::Kind::kIdentifier;
    c.identifier = expect_name();
    return c;
  }

  std::vector<Constant> parse_tuple() {
    std::vector<Constant> out;
    if (accept(Tok::kLParen)) {
      out.push_back(parse_constant());
      while (accept(Tok::kComma)) out.push_back(parse_constant());
      expect(Tok::kRParen);
    } else {
      out.push_back(parse_constant());
    }
    return out;
  }

  // After `name :=`: `{...}` or a single constant.
  Enumeration parse_enumeration_body(const std::string& target) {
    Enumeration e;
    e.target = target;
    if (!accept(Tok::kLBrace)) {
      e.kind = Enumeration::Kind::kFunctionMap;
      e.entries.push_back(EnumEntry{{}, parse_constant()});
      return e;
    }
    if (at(Tok::kRBrace)) {
      next();
      return e;
    }
    // Integer range `lo..hi`.
    size_t save = pos_;
    bool negative_lo = accept(Tok::kMinus);
    if (at(Tok::kNumber) && ahead(1).kind == Tok::kDotDot) {
      Token lo = next();
      next();
      bool negative_hi = accept(Tok::kMinus);
      Token hi = expect(Tok::kNumber);
      auto lo_n = parse_number(lo.text);
      auto hi_n = parse_number(hi.text);
      if (!is_integer(*lo_n) || !is_integer(*hi_n)) fail({"integer"}, "range bounds must be integers");
      BigInt l = numerator(*lo_n);
      BigInt h = numerator(*hi_n);
      if (negative_lo) l = -l;
      if (negative_hi) h = -h;
      e.range = std::make_pair(l, h);
      expect(Tok::kRBrace);
      return e;
    }
    pos_ = save;
    bool first = true;
    do {
      EnumEntry entry;
      entry.args = parse_tuple();
      if (accept(Tok::kArrow)) {
        if (!first && e.kind != Enumeration::Kind::kFunctionMap) fail({"','"}, "mixed enumeration entries");
        e.kind = Enumeration::Kind::kFunctionMap;
        entry.result = parse_constant();
      } else if (e.kind == Enumeration::Kind::kFunctionMap) {
        fail({"'->'"});
      }
      first = false;
      e.entries.push_back(std::move(entry));
    } while (accept(Tok::kComma));
    expect(Tok::kRBrace);
    return e;
  }

  std::vector<Binder> parse_binders() {
    std::vector<Binder> binders;
    for (;;) {
      Binder b;
      b.vars.push_back(expect_name());
      while (accept(Tok::kComma)) b.vars.push_back(expect_name());
      expect_keyword("in");
      b.type = parse_type();
      binders.push_back(std::move(b));
      if (!accept(Tok::kComma)) break;
    }
    return binders;
  }

 public:
  ExprPtr parse_expr() { return parse_iff(); }

 private:
  ExprPtr parse_iff() {
    SourceSpan start = span_here();
    ExprPtr left = parse_implies();
    while (accept(Tok::kIff)) {
      ExprPtr right = parse_implies();
      left = make_nary(ExprKind::kIff, {left, right}, span_from(start));
    }
    return left;
  }

  ExprPtr parse_implies() {
    SourceSpan start = span_here();
    ExprPtr left = parse_or();
    if (accept(Tok::kImplies)) {
      ExprPtr right = parse_implies();
      return make_nary(ExprKind::kImplies, {left, right}, span_from(start));
    }
    return left;
  }

  ExprPtr parse_or() {
    SourceSpan start = span_here();
    ExprPtr first = parse_and();
    if (!at(Tok::kOr)) return first;
    std::vector<ExprPtr> args{first};
    while (accept(Tok::kOr)) args.push_back(parse_and());
    return make_nary(ExprKind::kOr, std::move(args), span_from(start));
  }

  ExprPtr parse_and() {
    SourceSpan start = span_here();
    ExprPtr first = parse_compare();
    if (!at(Tok::kAnd)) return first;
    std::vector<ExprPtr> args{first};
    while (accept(Tok::kAnd)) args.push_back(parse_compare());
    return make_nary(ExprKind::kAnd, std::move(args), span_from(start));
  }

  static bool cmp_of(Tok t, CmpOp& op) {
    switch (t) {
      case Tok::kEq: op = CmpOp::kEq; return true;
      case Tok::kNe: op = CmpOp::kNe; return true;
      case Tok::kLt: op = CmpOp::kLt; return true;
      case Tok::kLe: op = CmpOp::kLe; return true;
      case Tok::kGt: op = CmpOp::kGt; return true;
      case Tok::kGe: op = CmpOp::kGe; return true;
      default: return false;
    }
  }

  ExprPtr parse_compare() {
    SourceSpan start = span_here();
    ExprPtr first = parse_sum();
    CmpOp op;
    if (!cmp_of(cur().kind, op)) return first;
    std::vector<ExprPtr> operands{first};
    std::vector<CmpOp> ops;
    while (cmp_of(cur().kind, op)) {
      next();
      ops.push_back(op);
      operands.push_back(parse_sum());
    }
    return make_compare(std::move(operands), std::move(ops), span_from(start));
  }

  ExprPtr parse_sum() {
    SourceSpan start = span_here();
    ExprPtr left = parse_product();
    for (;;) {
      if (accept(Tok::kPlus)) {
        left = make_nary(ExprKind::kAdd, {left, parse_product()}, span_from(start));
      } else if (accept(Tok::kMinus)) {
        left = make_nary(ExprKind::kSub, {left, parse_product()}, span_from(start));
      } else {
        return left;
      }
    }
  }

  ExprPtr parse_product() {
    SourceSpan start = span_here();
    ExprPtr left = parse_unary();
    for (;;) {
      if (accept(Tok::kStar)) {
        left = make_nary(ExprKind::kMul, {left, parse_unary()}, span_from(start));
      } else if (accept(Tok::kSlash)) {
        left = make_nary(ExprKind::kDiv, {left, parse_unary()}, span_from(start));
      } else {
        return left;
      }
    }
  }

  ExprPtr parse_unary() {
    SourceSpan start = span_here();
    if (accept(Tok::kNot)) return make_unary(ExprKind::kNot, parse_unary(), span_from(start));
    if (at(Tok::kMinus)) {
      next();
      if (at(Tok::kNumber)) {
        Token t = next();
        return make_number(-*parse_number(t.text), t.text.find('.') != std::string::npos,
                           span_from(start));
      }
      return make_unary(ExprKind::kNeg, parse_unary(), span_from(start));
    }
    return parse_primary();
  }

  ExprPtr parse_aggregate(ExprKind kind, SourceSpan start) {
    expect(Tok::kLParen);
    expect_keyword("lambda");
    std::vector<Binder> binders = parse_binders();
    expect(Tok::kColon);
    ExprPtr body = parse_expr();
    expect(Tok::kRParen);
    return make_binding(kind, std::move(binders), std::move(body), span_from(start));
  }

  ExprPtr parse_primary() {
    SourceSpan start = span_here();
    if (accept(Tok::kLParen)) {
      ExprPtr e = parse_expr();
      expect(Tok::kRParen);
      return e;
    }
    if (at(Tok::kForall) || at(Tok::kExists)) {
      ExprKind kind = next().kind == Tok::kForall ? ExprKind::kForall : ExprKind::kExists;
      std::vector<Binder> binders = parse_binders();
      expect(Tok::kColon);
      ExprPtr body = parse_expr();
      return make_binding(kind, std::move(binders), std::move(body), span_from(start));
    }
    if (accept(Tok::kHash)) {
      expect(Tok::kLBrace);
      std::vector<Binder> binders = parse_binders();
      expect(Tok::kColon);
      ExprPtr body = parse_expr();
      expect(Tok::kRBrace);
      return make_binding(ExprKind::kCount, std::move(binders), std::move(body), span_from(start));
    }
    if (accept(Tok::kDollar)) {
      expect(Tok::kLParen);
      std::vector<ExprPtr> args{parse_expr()};
      expect(Tok::kRParen);
      for (ExprPtr& a : parse_args()) args.push_back(std::move(a));
      return make_nary(ExprKind::kConceptApply, std::move(args), span_from(start));
    }
    if (accept(Tok::kBacktick)) {
      return make_concept_lit(expect_name(), span_from(start));
    }
    if (at(Tok::kNumber)) {
      Token t = next();
      return make_number(*parse_number(t.text), t.text.find('.') != std::string::npos,
                         span_from(start));
    }
    if (at(Tok::kIdent)) {
      const std::string& word = cur().text;
      if (word == "true" || word == "false") {
        bool value = next().text == "true";
        return make_bool(value, span_from(start));
      }
      if (word == "if") {
        next();
        ExprPtr cond = parse_expr();
        expect_keyword("then");
        ExprPtr then_branch = parse_expr();
        expect_keyword("else");
        ExprPtr else_branch = parse_expr();
        return make_nary(ExprKind::kIte, {cond, then_branch, else_branch}, span_from(start));
      }
      if ((word == "sum" || word == "min" || word == "max") && ahead(1).kind == Tok::kLParen &&
          ahead(2).kind == Tok::kIdent && ahead(2).text == "lambda") {
        ExprKind kind = word == "sum" ? ExprKind::kSum : word == "min" ? ExprKind::kMin : ExprKind::kMax;
        next();
        return parse_aggregate(kind, start);
      }
      std::string name = expect_name();
      if (at(Tok::kLParen)) return make_apply(name, parse_args(), span_from(start));
      return make_name(name, span_from(start));
    }
    fail({"expression"});
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace

KnowledgeBase parse_kb(std::string_view text) { return Parser(text).parse_kb(); }

ExprPtr parse_expr(std::string_view text) { return Parser(text).parse_single_expr(); }

}  // namespace fodot
