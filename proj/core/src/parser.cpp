#include "querylink/parser.hpp"

#include <cctype>
#include <functional>
#include <set>
#include <sstream>

namespace querylink {

ParseError::ParseError(std::string message, size_t position)
    : std::runtime_error(message + " (offset " + std::to_string(position) + ")"),
      position_(position) {}

namespace {

struct Token {
  enum Kind { IDENT, DOT, COMMA, LPAREN, RPAREN, END } kind = END;
  std::string text;
  size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    current_.pos = pos_;
    if (pos_ >= text_.size()) {
      current_.kind = Token::END;
      current_.text.clear();
      return;
    }
    char c = text_[pos_];
    switch (c) {
      case '.': current_ = {Token::DOT, ".", pos_++}; return;
      case ',': current_ = {Token::COMMA, ",", pos_++}; return;
      case '(': current_ = {Token::LPAREN, "(", pos_++}; return;
      case ')': current_ = {Token::RPAREN, ")", pos_++}; return;
      default: break;
    }
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    current_ = {Token::IDENT, text_.substr(start, pos_ - start), start};
  }

  const std::string& text_;
  size_t pos_ = 0;
  Token current_;
};

std::string lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  Query parse() {
    Query q;
    expect_keyword("select");
    q.select.push_back(parse_field());
    while (lex_.peek().kind == Token::COMMA) {
      lex_.take();
      q.select.push_back(parse_field());
    }
    expect_keyword("from");
    q.from.push_back(parse_name());
    while (lex_.peek().kind == Token::COMMA) {
      lex_.take();
      q.from.push_back(parse_name());
    }
    expect_keyword("where");
    q.where = parse_tree();
    if (lex_.peek().kind != Token::END)
      throw ParseError("trailing input after where clause", lex_.peek().pos);
    check_scope(q);
    return q;
  }

 private:
  bool peek_keyword(const char* kw) const {
    return lex_.peek().kind == Token::IDENT && lower(lex_.peek().text) == kw;
  }

  void expect_keyword(const char* kw) {
    if (!peek_keyword(kw))
      throw ParseError(std::string("expected keyword '") + kw + "'",
                       lex_.peek().pos);
    lex_.take();
  }

  std::string parse_name() {
    if (lex_.peek().kind != Token::IDENT)
      throw ParseError("expected a name", lex_.peek().pos);
    return lex_.take().text;
  }

  FieldRef parse_field() {
    FieldRef f;
    f.type = parse_name();
    if (lex_.peek().kind != Token::DOT)
      throw ParseError("expected '.' in field reference", lex_.peek().pos);
    lex_.take();
    f.value = parse_name();
    return f;
  }

  // tree := operand (logop operand)*, one logop kind per level, left fold.
  std::unique_ptr<WhereNode> parse_tree() {
    auto node = parse_operand();
    bool haveOp = false;
    LogicalOp levelOp = LogicalOp::AND;
    while (peek_keyword("and") || peek_keyword("or")) {
      size_t pos = lex_.peek().pos;
      LogicalOp op = lower(lex_.take().text) == "and" ? LogicalOp::AND
                                                      : LogicalOp::OR;
      if (haveOp && op != levelOp)
        throw ParseError("mixed And/Or at one level; parenthesise the nesting",
                         pos);
      haveOp = true;
      levelOp = op;
      node = WhereNode::make_node(op, std::move(node), parse_operand());
    }
    return node;
  }

  std::unique_ptr<WhereNode> parse_operand() {
    if (lex_.peek().kind == Token::LPAREN) {
      lex_.take();
      auto node = parse_tree();
      if (lex_.peek().kind != Token::RPAREN)
        throw ParseError("expected ')'", lex_.peek().pos);
      lex_.take();
      return node;
    }
    return WhereNode::make_leaf(parse_comparison());
  }

  Comparison parse_comparison() {
    Comparison c;
    size_t pos = lex_.peek().pos;
    c.lhs = parse_field();
    if (lex_.peek().kind != Token::IDENT)
      throw ParseError("expected comparison operator", lex_.peek().pos);
    std::string opText = lex_.take().text;
    std::string up;
    for (char ch : opText) up += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (up != "EQ" && up != "GT" && up != "LT")
      throw ParseError("unknown comparison operator '" + opText + "'", pos);
    c.op = compare_op_from_string(up);
    c.rhs = parse_field();
    return c;
  }

  // Scope errors carry position 0; the structural facts they report are not
  // tied to one token.
  void check_scope(const Query& q) {
    std::set<SourceTypeId> fromSet(q.from.begin(), q.from.end());
    for (const auto& f : q.select)
      if (!fromSet.count(f.type))
        throw ParseError("select type '" + f.type + "' not in from list", 0);
    std::function<void(const WhereNode&)> walk = [&](const WhereNode& n) {
      if (!n.is_leaf) {
        walk(*n.left);
        walk(*n.right);
        return;
      }
      for (const FieldRef* f : {&n.leaf.lhs, &n.leaf.rhs})
        if (!fromSet.count(f->type))
          throw ParseError("comparison type '" + f->type + "' not in from list",
                           0);
    };
    walk(*q.where);
  }

  Lexer lex_;
};

void render_inner(const WhereNode& n, std::ostream& os) {
  auto operand = [&os](const WhereNode& child) {
    if (child.is_leaf) {
      os << render_comparison(child.leaf);
    } else {
      os << '(';
      render_inner(child, os);
      os << ')';
    }
  };
  operand(*n.left);
  os << (n.logical == LogicalOp::AND ? " And " : " Or ");
  operand(*n.right);
}

}  // namespace

Query parse_query(const std::string& text) { return Parser(text).parse(); }

std::string render_comparison(const Comparison& c) {
  std::ostringstream os;
  os << c.lhs.type << '.' << c.lhs.value << ' ' << to_string(c.op) << ' '
     << c.rhs.type << '.' << c.rhs.value;
  return os.str();
}

std::string render_query(const Query& q) {
  std::ostringstream os;
  os << "Select ";
  for (size_t i = 0; i < q.select.size(); ++i) {
    if (i) os << ", ";
    os << q.select[i].type << '.' << q.select[i].value;
  }
  os << " From ";
  for (size_t i = 0; i < q.from.size(); ++i) {
    if (i) os << ", ";
    os << q.from[i];
  }
  os << " Where ";
  const WhereNode& root = *q.where;
  if (root.is_leaf) {
    os << '(' << render_comparison(root.leaf) << ')';
  } else {
    auto operand = [&os](const WhereNode& child) {
      os << '(';
      if (child.is_leaf)
        os << render_comparison(child.leaf);
      else
        render_inner(child, os);
      os << ')';
    };
    operand(*root.left);
    os << (root.logical == LogicalOp::AND ? " And " : " Or ");
    operand(*root.right);
  }
  return os.str();
}

}  // namespace querylink
