#include "proxident/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace proxident {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

std::string bits_string(const SparsityPattern& p) {
  std::string s(p.size(), '0');
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i]) s[i] = '1';
  return s;
}

SparsityPattern parse_bits(const std::string& s, const std::string& origin) {
  SparsityPattern p(s.size(), false);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1')
      throw std::runtime_error(origin + ": pattern must be a string of 0/1 characters");
    p.set(i, s[i] == '1');
  }
  return p;
}

const std::string& require(const KeyValues& kv, const std::string& key, const std::string& origin) {
  auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error(origin + ": missing key '" + key + "'");
  return it->second;
}

double to_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::runtime_error(what + ": not a number: '" + s + "'");
  return v;
}

long long to_integer(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::runtime_error(what + ": not an integer: '" + s + "'");
  return v;
}

}  // namespace

void write_matrix(const fs::path& path, const Matrix& m) {
  auto out = open_out(path);
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Matrix read_matrix(const fs::path& path) {
  auto in = open_in(path);
  long long rows = -1, cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw std::runtime_error(path.string() + ": header must be 'rows cols'");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (!(in >> m(i, j)))
        throw std::runtime_error(path.string() + ": expected " + std::to_string(rows * cols) +
                                 " entries");
  std::string extra;
  if (in >> extra) throw std::runtime_error(path.string() + ": trailing data after matrix");
  return m;
}

void write_vector(const fs::path& path, const Vector& v) { write_matrix(path, Matrix(v)); }

Vector read_vector(const fs::path& path) {
  Matrix m = read_matrix(path);
  if (m.cols() != 1) throw std::runtime_error(path.string() + ": expected a single column");
  return m.col(0);
}

KeyValues parse_key_values(std::istream& in, const std::string& origin) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values(const fs::path& path) {
  auto in = open_in(path);
  return parse_key_values(in, path.string());
}

void write_key_values(const fs::path& path, const KeyValues& kv) {
  auto out = open_out(path);
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

void save_bundle(const fs::path& dir, const CompositeProblem& problem, const KeyValues& extra) {
  const auto ls = std::dynamic_pointer_cast<const LeastSquaresOracle>(problem.smooth);
  if (!ls) throw std::invalid_argument("save_bundle: only least-squares problems can be stored");
  fs::create_directories(dir);
  write_matrix(dir / "A.txt", ls->a());
  write_vector(dir / "b.txt", ls->b());
  KeyValues meta = extra;
  const Shape& shape = problem.reg.shape();
  meta["regularizer"] = std::string(to_string(problem.reg.kind()));
  meta["lambda"] = format_double(problem.reg.weight());
  meta["rows"] = std::to_string(shape.rows);
  meta["cols"] = std::to_string(shape.cols);
  meta["matrix"] = shape.matrix ? "1" : "0";
  meta["seed"] = std::to_string(problem.seed);
  if (problem.truth) {
    const GroundTruth& t = *problem.truth;
    write_vector(dir / "xstar.txt", t.x_star);
    meta["xstar-file"] = "xstar.txt";
    meta["gamma"] = format_double(t.gamma);
    meta["margin"] = format_double(t.margin);
    meta["truth_pattern"] = bits_string(t.pattern);
  } else {
    meta["gamma"] = format_double(1.0 / ls->lipschitz());
  }
  write_key_values(dir / "meta", meta);
}

KeyValues load_bundle_meta(const fs::path& dir) { return read_key_values(dir / "meta"); }

CompositeProblem load_bundle(const fs::path& dir) {
  const std::string origin = (dir / "meta").string();
  const KeyValues meta = load_bundle_meta(dir);
  Matrix a = read_matrix(dir / "A.txt");
  Vector b = read_vector(dir / "b.txt");
  const auto kind = regularizer_kind_from_string(require(meta, "regularizer", origin));
  const double lambda = to_double(require(meta, "lambda", origin), origin + " lambda");
  const Index rows = to_integer(require(meta, "rows", origin), origin + " rows");
  const Index cols = to_integer(require(meta, "cols", origin), origin + " cols");
  const bool matrix = meta.count("matrix") && meta.at("matrix") == "1";
  const Shape shape = matrix ? Shape::matrix_shape(rows, cols) : Shape::vector(rows);
  if (shape.size() != a.cols())
    throw std::runtime_error(origin + ": shape does not match the columns of A");

  CompositeProblem p{least_squares_oracle(a, b), Regularizer::make(kind, shape, lambda),
                     std::nullopt, 0};
  if (auto it = meta.find("seed"); it != meta.end())
    p.seed = static_cast<std::uint64_t>(to_integer(it->second, origin + " seed"));
  if (auto it = meta.find("xstar-file"); it != meta.end()) {
    GroundTruth t;
    t.x_star = read_vector(dir / it->second);
    if (t.x_star.size() != a.cols())
      throw std::runtime_error(origin + ": xstar has the wrong dimension");
    t.gamma = to_double(require(meta, "gamma", origin), origin + " gamma");
    t.u_star = t.x_star - t.gamma * p.smooth->gradient(t.x_star);
    if (auto m = meta.find("margin"); m != meta.end()) t.margin = to_double(m->second, origin);
    if (auto tp = meta.find("truth_pattern"); tp != meta.end())
      t.pattern = parse_bits(tp->second, origin);
    else
      t.pattern = p.reg.prox(t.u_star, t.gamma).pattern;
    if (t.pattern.size() != p.reg.collection().size())
      throw std::runtime_error(origin + ": truth pattern has the wrong length");
    p.truth = std::move(t);
  }
  return p;
}

void write_trace_csv(std::ostream& out, const Trace& trace, bool exploit_columns) {
  out << "k,objective,nnz,pattern_hash,u_step,comm_coords,wallclock_s";
  if (exploit_columns) out << ",accel_active,enforced_count";
  out << '\n';
  for (const auto& r : trace) {
    out << r.k << ',' << format_double(r.objective) << ',' << r.nnz << ',' << r.pattern.hex() << ','
        << format_double(r.u_step) << ',' << r.comm_coords << ',' << format_double(r.wallclock_s);
    if (exploit_columns) out << ',' << r.accel_active << ',' << r.enforced_count;
    out << '\n';
  }
}

void write_trace_csv(const fs::path& path, const Trace& trace, bool exploit_columns) {
  auto out = open_out(path);
  write_trace_csv(out, trace, exploit_columns);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace proxident
