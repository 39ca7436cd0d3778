#include "kernelkit/kernel/surrogate.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kernelkit::kernel {

namespace {

constexpr const char* kHeader = "kernelkit-surrogate v1";

void put_real(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void put_domain(std::string& out, const Domain& d) {
  if (const auto* b = std::get_if<Box>(&d)) {
    out += "box " + std::to_string(b->lo.size());
    for (std::size_t k = 0; k < b->lo.size(); ++k) {
      out += ' ';
      put_real(out, b->lo[k]);
      out += ' ';
      put_real(out, b->hi[k]);
    }
  } else {
    const auto& c = std::get<Disc>(d);
    out += "disc ";
    put_real(out, c.cx);
    out += ' ';
    put_real(out, c.cy);
    out += ' ';
    put_real(out, c.r);
  }
}

// Whitespace tokenizer that reports the line of the offending token.
class Reader {
 public:
  explicit Reader(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens_.push_back({tok, lineno});
    }
  }

  std::string word() {
    if (pos_ >= tokens_.size()) fail("unexpected end of input");
    return tokens_[pos_++].text;
  }
  void expect(const std::string& w) {
    const auto got = word();
    if (got != w) fail("expected '" + w + "', got '" + got + "'", pos_ - 1);
  }
  double real() {
    const auto w = word();
    try {
      std::size_t used = 0;
      const double v = std::stod(w, &used);
      if (used != w.size()) throw std::invalid_argument(w);
      return v;
    } catch (const std::exception&) {
      fail("expected a number, got '" + w + "'", pos_ - 1);
    }
  }
  std::size_t count() {
    const double v = real();
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) fail("expected a count", pos_ - 1);
    return static_cast<std::size_t>(v);
  }
  bool done() const { return pos_ >= tokens_.size(); }
  [[noreturn]] void fail(const std::string& msg) const { fail(msg, pos_); }
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    const int line = at < tokens_.size() ? tokens_[at].line : (tokens_.empty() ? 0 : tokens_.back().line);
    throw std::runtime_error("surrogate file line " + std::to_string(line) + ": " + msg);
  }

 private:
  struct Token {
    std::string text;
    int line;
  };
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

Domain read_domain(Reader& r) {
  const auto kind = r.word();
  if (kind == "box") {
    Box b;
    const auto dim = r.count();
    for (std::size_t k = 0; k < dim; ++k) {
      b.lo.push_back(r.real());
      b.hi.push_back(r.real());
    }
    return b;
  }
  if (kind == "disc") {
    Disc d;
    d.cx = r.real();
    d.cy = r.real();
    d.r = r.real();
    return d;
  }
  r.fail("unknown domain kind '" + kind + "'");
}

}  // namespace

Surrogate::Surrogate(std::shared_ptr<const Interpolant> interpolant, double coefficient) {
  if (!interpolant) throw std::invalid_argument("surrogate: null interpolant");
  terms_.push_back({coefficient, std::move(interpolant)});
}

Surrogate& Surrogate::operator+=(const Surrogate& other) {
  if (domains_.empty()) domains_ = other.domains_;
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

Surrogate& Surrogate::operator*=(double c) {
  for (auto& t : terms_) t.coefficient *= c;
  return *this;
}

double Surrogate::operator()(std::span<const double> x) const {
  double acc = 0.0;
  for (const auto& t : terms_) acc += t.coefficient * (*t.interpolant)(x);
  return acc;
}

std::size_t Surrogate::dim() const {
  if (!terms_.empty()) return terms_.front().interpolant->dim();
  std::size_t d = 0;
  for (const auto& dom : domains_) d += domain_dim(dom);
  return d;
}

std::string Surrogate::serialize() const {
  std::string out = kHeader;
  out += "\ndomains " + std::to_string(domains_.size()) + "\n";
  for (const auto& d : domains_) {
    out += "domain ";
    put_domain(out, d);
    out += '\n';
  }
  out += "terms " + std::to_string(terms_.size()) + "\n";
  for (const auto& t : terms_) {
    const auto& s = *t.interpolant;
    out += "term ";
    put_real(out, t.coefficient);
    out += "\nlayout ";
    out += s.is_tensor() ? "tensor" : "scattered";
    out += "\nblocks " + std::to_string(s.kernel().blocks().size()) + "\n";
    for (const auto& b : s.kernel().blocks()) {
      out += "block beta ";
      put_real(out, b.kernel.beta());
      out += " dim " + std::to_string(b.kernel.dim()) + " length_scale ";
      put_real(out, b.kernel.length_scale());
      out += " offset " + std::to_string(b.offset) + "\n";
    }
    out += "sets " + std::to_string(s.factor_nodes().size()) + "\n";
    for (const auto& X : s.factor_nodes()) {
      out += "set ";
      put_domain(out, X.domain());
      out += " points " + std::to_string(X.size()) + "\n";
      for (std::size_t i = 0; i < X.size(); ++i) {
        for (std::size_t k = 0; k < X.dim(); ++k) {
          if (k) out += ' ';
          put_real(out, X.coord(i, k));
        }
        out += '\n';
      }
    }
    out += "alpha " + std::to_string(s.size()) + "\n";
    for (double a : s.coefficients()) {
      put_real(out, a);
      out += '\n';
    }
  }
  out += "end\n";
  return out;
}

Surrogate Surrogate::parse(std::string_view text) {
  Reader r(text);
  r.expect("kernelkit-surrogate");
  r.expect("v1");
  Surrogate out;
  r.expect("domains");
  const auto nd = r.count();
  for (std::size_t i = 0; i < nd; ++i) {
    r.expect("domain");
    out.domains_.push_back(read_domain(r));
  }
  r.expect("terms");
  const auto nt = r.count();
  for (std::size_t t = 0; t < nt; ++t) {
    r.expect("term");
    const double coef = r.real();
    r.expect("layout");
    const auto layout = r.word();
    if (layout != "tensor" && layout != "scattered") r.fail("unknown layout '" + layout + "'");
    r.expect("blocks");
    const auto nb = r.count();
    std::vector<KernelBlock> blocks;
    for (std::size_t b = 0; b < nb; ++b) {
      r.expect("block");
      r.expect("beta");
      const double beta = r.real();
      r.expect("dim");
      const auto dim = r.count();
      r.expect("length_scale");
      const double ls = r.real();
      r.expect("offset");
      const auto offset = r.count();
      blocks.push_back({MaternKernel(beta, static_cast<int>(dim), ls), offset});
    }
    r.expect("sets");
    const auto ns = r.count();
    std::vector<PointSet> sets;
    for (std::size_t s = 0; s < ns; ++s) {
      r.expect("set");
      Domain d = read_domain(r);
      r.expect("points");
      const auto np = r.count();
      const auto dim = domain_dim(d);
      std::vector<double> rows(np * dim);
      for (double& v : rows) v = r.real();
      sets.emplace_back(std::move(d), dim, std::move(rows));
    }
    r.expect("alpha");
    std::vector<double> alpha(r.count());
    for (double& v : alpha) v = r.real();
    auto interp = std::make_shared<const Interpolant>(Interpolant::from_coefficients(
        TensorKernel(std::move(blocks)), std::move(sets), layout == "tensor", std::move(alpha)));
    out.terms_.push_back({coef, std::move(interp)});
  }
  r.expect("end");
  if (!r.done()) r.fail("trailing content after 'end'");
  return out;
}

void Surrogate::save(const std::filesystem::path& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << serialize();
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

Surrogate Surrogate::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

}  // namespace kernelkit::kernel
