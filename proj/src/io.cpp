#include "trisep/io.hpp"

#include "trisep/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace trisep {

using Json = nlohmann::ordered_json;

namespace {

// ---- emitting ----

bool scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

void emit(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  if (j.is_number_float()) {
    const double x = j.get<double>();
    out += std::isfinite(x) ? format_number(x) : "null";
  } else if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += inner + Json(it.key()).dump() + ": ";
      emit(it.value(), out, indent + 1);
    }
    out += "\n" + pad + "}";
  } else if (j.is_array()) {
    bool flat = true;
    for (const Json& x : j) flat = flat && scalar(x);
    if (flat) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ", ";
        emit(j[i], out, indent + 1);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out += ",\n";
      out += inner;
      emit(j[i], out, indent + 1);
    }
    out += "\n" + pad + "]";
  } else {
    out += j.dump();
  }
}

std::string dump(const Json& j) {
  std::string out;
  emit(j, out, 0);
  out += "\n";
  return out;
}

Json real_rows(const Matrix& m, bool imag) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(imag ? m(i, k).imag() : m(i, k).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

Json matrix_json(const Matrix& m) { return Json{{"re", real_rows(m, false)}, {"im", real_rows(m, true)}}; }

Json vector_json(const Vector& v) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return Json{{"re", re}, {"im", im}};
}

template <std::size_t K>
Json array_json(const std::array<double, K>& a) {
  Json out = Json::array();
  for (double x : a) out.push_back(x);
  return out;
}

// ---- parsing ----

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  Json parse() const {
    try {
      return Json::parse(text_);
    } catch (const Json::parse_error& e) {
      const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
      std::string what = e.what();
      const auto colon = what.find("syntax error");
      if (colon != std::string::npos) what = what.substr(colon);
      throw FormatError(where(byte) + ": " + what);
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const std::string quoted = "\"" + key + "\"";
    const std::size_t at = key.empty() ? std::string::npos : text_.find(quoted);
    throw FormatError(where(at == std::string::npos ? 0 : at) + ": " + message);
  }

  const Json& field(const Json& obj, const std::string& key) const {
    if (!obj.is_object()) fail(key, "expected an object holding '" + key + "'");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(key, "missing key '" + key + "'");
    return *it;
  }

  double number(const Json& j, const std::string& key) const {
    if (!j.is_number()) fail(key, "'" + key + "' must be a number");
    return j.get<double>();
  }

  std::vector<double> numbers(const Json& j, const std::string& key) const {
    if (!j.is_array()) fail(key, "'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const Json& x : j) out.push_back(number(x, key));
    return out;
  }

  Vector vector(const Json& j, const std::string& key, Eigen::Index size) const {
    const std::vector<double> re = numbers(field(j, "re"), key);
    const std::vector<double> im = numbers(field(j, "im"), key);
    if (re.size() != im.size() || static_cast<Eigen::Index>(re.size()) != size) {
      fail(key, "'" + key + "' must have " + std::to_string(size) + " real and imaginary parts");
    }
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = Complex(re[i], im[i]);
    return v;
  }

  Matrix matrix(const Json& j, const std::string& key, Eigen::Index size) const {
    const Json& re = field(j, "re");
    const Json& im = field(j, "im");
    if (!re.is_array() || !im.is_array() || static_cast<Eigen::Index>(re.size()) != size ||
        static_cast<Eigen::Index>(im.size()) != size) {
      fail(key, "'" + key + "' needs " + std::to_string(size) + " rows in both re and im");
    }
    Matrix m(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
      const std::vector<double> r = numbers(re[static_cast<std::size_t>(i)], key);
      const std::vector<double> s = numbers(im[static_cast<std::size_t>(i)], key);
      if (static_cast<Eigen::Index>(r.size()) != size || static_cast<Eigen::Index>(s.size()) != size) {
        fail(key, "row " + std::to_string(i) + " of '" + key + "' must have " + std::to_string(size) + " entries");
      }
      for (Eigen::Index k = 0; k < size; ++k) m(i, k) = Complex(r[k], s[k]);
    }
    return m;
  }

  TriDims dims(const Json& j) const {
    const std::vector<double> d = numbers(j, "dims");
    if (d.size() != 3) fail("dims", "'dims' must list three local dimensions");
    for (double x : d) {
      if (!(x >= 1.0) || x != std::floor(x) || x > 4096.0) fail("dims", "'dims' entries must be positive integers");
    }
    if (d[0] * d[1] * d[2] > 4096.0) fail("dims", "total dimension exceeds 4096");
    return TriDims{static_cast<int>(d[0]), static_cast<int>(d[1]), static_cast<int>(d[2])};
  }

  std::string where(std::size_t byte) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return source_ + ":" + std::to_string(line) + ":" + std::to_string(col);
  }

 private:
  const std::string& text_;
  std::string source_;
};

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string state_to_json(const StateFile& file) {
  const DensityOperator& rho = file.rho;
  Json meta = Json::object();
  if (file.meta.seed) meta["seed"] = *file.meta.seed;
  if (file.meta.kind) meta["kind"] = *file.meta.kind;
  meta["normalized"] = file.meta.normalized;
  Json j{{"dims", {rho.dims.a, rho.dims.b, rho.dims.c}}, {"matrix", matrix_json(rho.matrix)}, {"meta", meta}};
  return dump(j);
}

StateFile parse_state(const std::string& text, const std::string& source) {
  const Reader r(text, source);
  const Json j = r.parse();
  const TriDims dims = r.dims(r.field(j, "dims"));
  const Matrix m = r.matrix(r.field(j, "matrix"), "matrix", dims.total());
  const double asym = (m - m.adjoint()).norm();
  if (asym > 1e-10 * std::max(1.0, m.norm())) {
    r.fail("matrix", "matrix is not Hermitian (||M - M^dagger||_F = " + format_number(asym) + ")");
  }
  StateMeta meta;
  if (j.contains("meta")) {
    const Json& mj = j["meta"];
    if (!mj.is_object()) r.fail("meta", "'meta' must be an object");
    if (mj.contains("seed")) {
      if (!mj["seed"].is_number_unsigned()) r.fail("seed", "'seed' must be a non-negative integer");
      meta.seed = mj["seed"].get<std::uint64_t>();
    }
    if (mj.contains("kind")) {
      if (!mj["kind"].is_string()) r.fail("kind", "'kind' must be a string");
      meta.kind = mj["kind"].get<std::string>();
    }
    if (mj.contains("normalized")) {
      if (!mj["normalized"].is_boolean()) r.fail("normalized", "'normalized' must be true or false");
      meta.normalized = mj["normalized"].get<bool>();
    }
  }
  const Matrix hermitian = 0.5 * (m + m.adjoint());
  return StateFile{DensityOperator(dims, hermitian, meta.normalized), meta};
}

CertificateFile certificate_from(const SeparabilityCertificate& cert) {
  CertificateFile f;
  f.decomposition = cert.decomposition;
  f.reconstruction = cert.reconstruction_residual;
  f.commutators = cert.canonical_residuals.commutators;
  f.ppt_min_eigs = cert.ppt.min_eigs;
  f.pivot = cert.canonical.pivot;
  f.computational_pivot = cert.computational_pivot;
  f.support_dims = cert.support_dims;
  f.charlie_compressed = cert.charlie_compressed;
  f.seed = cert.options.seed;
  f.tolerances = {
      {"ppt", cert.options.ppt_tol},
      {"reconstruction", cert.options.reconstruction_tol},
      {"canonical_residual", cert.options.canonical.residual_tol},
      {"commutator", cert.options.canonical.commutator_tol},
      {"joint_diagonalization", cert.options.joint_tol},
      {"rank", cert.options.canonical.rank.rel_tol},
  };
  return f;
}

std::string certificate_to_json(const CertificateFile& f) {
  Json terms = Json::array();
  for (const ProductTerm& t : f.decomposition.terms) {
    terms.push_back(Json{{"w", t.weight}, {"a", vector_json(t.a)}, {"b", vector_json(t.b)}, {"c", vector_json(t.c)}});
  }
  Json tolerances = Json::object();
  for (const auto& [name, value] : f.tolerances) tolerances[name] = value;
  const TriDims& d = f.decomposition.dims;
  Json j{
      {"dims", {d.a, d.b, d.c}},
      {"terms", terms},
      {"residuals",
       {{"reconstruction", f.reconstruction},
        {"commutators", array_json(f.commutators)},
        {"ppt_min_eigs", array_json(f.ppt_min_eigs)}}},
      {"pipeline",
       {{"pivot", {{"a", vector_json(f.pivot.a)}, {"b", vector_json(f.pivot.b)}, {"computational", f.computational_pivot}}},
        {"support_dims", {f.support_dims[0], f.support_dims[1], f.support_dims[2]}},
        {"charlie_compressed", f.charlie_compressed},
        {"seed", f.seed},
        {"rng", "trisep-rng-v1"},
        {"tolerances", tolerances},
        {"tool_version", f.tool_version}}},
  };
  return dump(j);
}

CertificateFile parse_certificate(const std::string& text, const std::string& source) {
  const Reader r(text, source);
  const Json j = r.parse();
  CertificateFile f;
  const TriDims dims = r.dims(r.field(j, "dims"));
  f.decomposition.dims = dims;
  const Json& terms = r.field(j, "terms");
  if (!terms.is_array()) r.fail("terms", "'terms' must be an array");
  for (const Json& t : terms) {
    ProductTerm term;
    term.weight = r.number(r.field(t, "w"), "w");
    term.a = r.vector(r.field(t, "a"), "a", dims.a);
    term.b = r.vector(r.field(t, "b"), "b", dims.b);
    term.c = r.vector(r.field(t, "c"), "c", dims.c);
    f.decomposition.terms.push_back(std::move(term));
  }
  const Json& res = r.field(j, "residuals");
  f.reconstruction = r.number(r.field(res, "reconstruction"), "reconstruction");
  const std::vector<double> comm = r.numbers(r.field(res, "commutators"), "commutators");
  if (comm.size() != 9) r.fail("commutators", "'commutators' must hold 9 numbers");
  std::copy(comm.begin(), comm.end(), f.commutators.begin());
  const std::vector<double> eigs = r.numbers(r.field(res, "ppt_min_eigs"), "ppt_min_eigs");
  if (eigs.size() != 6) r.fail("ppt_min_eigs", "'ppt_min_eigs' must hold 6 numbers");
  std::copy(eigs.begin(), eigs.end(), f.ppt_min_eigs.begin());

  const Json& pipe = r.field(j, "pipeline");
  const Json& pivot = r.field(pipe, "pivot");
  f.pivot.a = r.vector(r.field(pivot, "a"), "a", 2);
  f.pivot.b = r.vector(r.field(pivot, "b"), "b", 3);
  if (pivot.contains("computational") && pivot["computational"].is_boolean()) {
    f.computational_pivot = pivot["computational"].get<bool>();
  }
  if (pipe.contains("support_dims")) {
    const std::vector<double> s = r.numbers(pipe["support_dims"], "support_dims");
    if (s.size() != 3) r.fail("support_dims", "'support_dims' must hold 3 numbers");
    for (int i = 0; i < 3; ++i) f.support_dims[static_cast<std::size_t>(i)] = static_cast<int>(s[static_cast<std::size_t>(i)]);
  }
  if (pipe.contains("charlie_compressed") && pipe["charlie_compressed"].is_boolean()) {
    f.charlie_compressed = pipe["charlie_compressed"].get<bool>();
  }
  const Json& seed = r.field(pipe, "seed");
  if (!seed.is_number_unsigned()) r.fail("seed", "'seed' must be a non-negative integer");
  f.seed = seed.get<std::uint64_t>();
  const Json& tol = r.field(pipe, "tolerances");
  if (!tol.is_object()) r.fail("tolerances", "'tolerances' must be an object");
  for (auto it = tol.begin(); it != tol.end(); ++it) f.tolerances[it.key()] = r.number(it.value(), it.key());
  const Json& version = r.field(pipe, "tool_version");
  if (!version.is_string()) r.fail("tool_version", "'tool_version' must be a string");
  f.tool_version = version.get<std::string>();
  return f;
}

std::string canonical_to_json(const CanonicalExtraction& ex) {
  const CanonicalForm& cf = ex.form;
  const CanonicalResiduals& r = ex.residuals;
  Json blocks = Json::array();
  for (const auto& row : r.blocks) blocks.push_back(array_json(row));
  Json j{
      {"n", cf.n()},
      {"B", matrix_json(cf.B)},
      {"C", matrix_json(cf.C)},
      {"D", matrix_json(cf.D)},
      {"F", matrix_json(cf.F)},
      {"pivot", {{"a", vector_json(cf.pivot.a)}, {"b", vector_json(cf.pivot.b)}}},
      {"residuals",
       {{"blocks", blocks},
        {"max_block", r.max_block()},
        {"delta", r.delta},
        {"delta_tilde", r.delta_tilde},
        {"commutators", array_json(r.commutators)}}},
      {"tool_version", kToolVersion},
  };
  return dump(j);
}

std::string kernel_vector_to_json(const ProductKernelVector& kv) {
  Json j{
      {"e", vector_json(kv.e)},
      {"f", vector_json(kv.f)},
      {"g", vector_json(kv.g)},
      {"residual", kv.residual},
      {"within_target", kv.within_target},
      {"strategy", strategy_name(kv.strategy)},
  };
  if (kv.alpha) {
    j["alpha"] = Json{{"re", kv.alpha->real()}, {"im", kv.alpha->imag()}};
  } else {
    j["alpha"] = nullptr;
  }
  return dump(j);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ":0:0: cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ":0:0: cannot open file for writing");
  out << text;
  if (!out) throw FormatError(path + ":0:0: write failed");
}

}  // namespace trisep
