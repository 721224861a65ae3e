#include "ttj/text_format.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "ttj/error.hpp"

namespace ttj {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool is_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
          c == '@' || c == '-')) {
      return false;
    }
  }
  return true;
}

// Tokens: "(", ")", "root:" and names.
std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(' || c == ')') {
      out.emplace_back(1, c);
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
             text[j] != '(' && text[j] != ')') {
        ++j;
        if (text[j - 1] == ':') break;
      }
      out.emplace_back(text.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

class TokenStream {
 public:
  explicit TokenStream(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {}
  bool done() const { return pos_ >= tokens_.size(); }
  const std::string& peek() const {
    if (done()) throw ParseError("unexpected end of input");
    return tokens_[pos_];
  }
  std::string next() {
    auto t = peek();
    ++pos_;
    return t;
  }
  void expect(const std::string& t) {
    auto got = next();
    if (got != t) throw ParseError("expected '" + t + "' but found '" + got + "'");
  }

 private:
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
};

BushyPlan parse_bushy_node(TokenStream& ts) {
  auto t = ts.next();
  if (t != "(") {
    if (!is_name(t)) throw ParseError("bad atom name '" + t + "'");
    return BushyPlan::make_leaf(t);
  }
  auto left = parse_bushy_node(ts);
  auto right = parse_bushy_node(ts);
  if (ts.peek() != ")") {
    throw ParseError("bushy plan nodes must have exactly two children");
  }
  ts.next();
  return BushyPlan::join(std::move(left), std::move(right));
}

ConvNode parse_conv_group(TokenStream& ts, bool root) {
  ts.expect("(");
  std::vector<ConvNode> nodes;
  while (ts.peek() != ")") {
    auto t = ts.peek();
    if (t == "root:") {
      ts.next();
      if (ts.peek() != "(") throw ParseError("'root:' must precede a group");
      nodes.push_back(parse_conv_group(ts, true));
    } else if (t == "(") {
      nodes.push_back(parse_conv_group(ts, false));
    } else {
      ts.next();
      if (!is_name(t)) throw ParseError("bad atom name '" + t + "'");
      nodes.push_back(ConvNode::leaf(t));
    }
  }
  ts.next();
  if (nodes.empty()) throw ParseError("empty convolution group");
  return ConvNode::nest(std::move(nodes), root);
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

Query parse_query(std::string_view text) {
  std::vector<Atom> atoms;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = trim(text.substr(start, nl - start));
    start = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    auto fail = [&](const std::string& what) {
      throw ParseError("query line " + std::to_string(line_no) + ": " + what);
    };
    auto open = line.find('(');
    if (open == std::string_view::npos || line.back() != ')') {
      fail("expected Alias=RelName(v1,...)");
    }
    Atom atom;
    auto head = trim(line.substr(0, open));
    if (auto eq = head.find('='); eq != std::string_view::npos) {
      atom.alias = std::string(trim(head.substr(0, eq)));
      atom.relation = std::string(trim(head.substr(eq + 1)));
      if (!is_name(atom.alias)) fail("bad alias");
    } else {
      atom.relation = std::string(head);
    }
    if (!is_name(atom.relation)) fail("bad relation name");
    auto body = line.substr(open + 1, line.size() - open - 2);
    std::size_t b = 0;
    while (b <= body.size()) {
      auto comma = body.find(',', b);
      if (comma == std::string_view::npos) comma = body.size();
      auto v = trim(body.substr(b, comma - b));
      if (!v.empty() || comma != body.size() || !atom.vars.empty()) {
        if (!is_name(v)) fail("bad variable name '" + std::string(v) + "'");
        atom.vars.emplace_back(v);
      }
      b = comma + 1;
    }
    atoms.push_back(std::move(atom));
  }
  if (atoms.empty()) throw ParseError("query has no atoms");
  try {
    return Query(std::move(atoms));
  } catch (const QueryError& e) {
    throw ParseError(e.what());
  }
}

std::string format_query(const Query& q) {
  std::string out;
  for (const auto& a : q.atoms()) {
    out += a.alias + "=" + a.relation + "(";
    for (std::size_t i = 0; i < a.vars.size(); ++i) {
      out += (i ? "," : "") + a.vars[i];
    }
    out += ")\n";
  }
  return out;
}

std::vector<std::string> parse_plan(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) {
    if (tok.front() == '#') {
      std::getline(in, tok);
      continue;
    }
    if (!is_name(tok)) throw ParseError("bad atom name in plan: '" + tok + "'");
    out.push_back(tok);
  }
  if (out.empty()) throw ParseError("plan is empty");
  return out;
}

BushyPlan parse_bushy(std::string_view text) {
  TokenStream ts(tokenize(text));
  auto p = parse_bushy_node(ts);
  if (!ts.done()) throw ParseError("trailing input after bushy plan");
  return p;
}

TreeConvolution parse_convolution(std::string_view text) {
  TokenStream ts(tokenize(text));
  bool root = false;
  if (ts.peek() == "root:") {
    ts.next();
    root = true;
  }
  auto c = parse_conv_group(ts, root);
  if (!ts.done()) throw ParseError("trailing input after convolution");
  return c;
}

}  // namespace ttj
