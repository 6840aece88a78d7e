#pragma once

// On-disk formats: dataset and state documents (JSON with a fixed key order
// and %.17g reals, so write -> read -> write is byte-identical), the
// per-iteration trace CSV and the sweep results CSV.

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "animc/animc.hpp"
#include "animc/dataset.hpp"
#include "animc/errors.hpp"

namespace animc {

/// Raised for unreadable files and malformed documents.
class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

namespace io {

inline std::string format_real(double x) {
  if (!std::isfinite(x)) throw NumericError("cannot serialize a non-finite value");
  if (x == 0.0) return "0";  // drops the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Shortest text that reads back to the same double; used for CSV fields.
inline std::string format_short(double x) {
  if (!std::isfinite(x)) throw NumericError("cannot serialize a non-finite value");
  if (x == 0.0) return "0";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace detail {

class Writer {
 public:
  std::string str() const { return out_.str(); }

  void key(int indent, const std::string& k) {
    out_ << std::string(indent, ' ') << '"' << k << "\": ";
  }
  void text(const std::string& s) {
    out_ << '"';
    for (char ch : s) {
      switch (ch) {
        case '"': out_ << "\\\""; break;
        case '\\': out_ << "\\\\"; break;
        case '\n': out_ << "\\n"; break;
        case '\t': out_ << "\\t"; break;
        default:
          if (static_cast<unsigned char>(ch) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", ch);
            out_ << buf;
          } else {
            out_ << ch;
          }
      }
    }
    out_ << '"';
  }
  void raw(const std::string& s) { out_ << s; }

  template <class Seq, class Fmt>
  void row(const Seq& values, Eigen::Index count, Fmt fmt) {
    out_ << '[';
    for (Eigen::Index i = 0; i < count; ++i) {
      if (i) out_ << ", ";
      out_ << fmt(values[i]);
    }
    out_ << ']';
  }

  void vector(const Vector& v) {
    row(v, v.size(), format_real);
  }

  // One JSON array per matrix row.
  void matrix(const Matrix& M, int indent) {
    out_ << '[';
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
      out_ << (r ? ",\n" : "\n") << std::string(indent + 2, ' ');
      const Eigen::RowVectorXd line = M.row(r);
      row(line, line.size(), format_real);
    }
    if (M.rows() > 0) out_ << '\n' << std::string(indent, ' ');
    out_ << ']';
  }

 private:
  std::ostringstream out_;
};

inline nlohmann::json parse(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(what + ": " + e.what());
  }
}

inline const nlohmann::json& field(const nlohmann::json& j,
                                   const std::string& k,
                                   const std::string& what) {
  if (!j.is_object() || !j.contains(k)) {
    throw FormatError(what + ": missing field '" + k + "'");
  }
  return j.at(k);
}

inline double real(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number()) throw FormatError(what + ": expected a number");
  return j.get<double>();
}

inline long long integer(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number_integer()) throw FormatError(what + ": expected an integer");
  return j.get<long long>();
}

inline Vector read_vector(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw FormatError(what + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = real(j[i], what);
  return v;
}

inline Matrix read_matrix(const nlohmann::json& j, Eigen::Index rows,
                          Eigen::Index cols, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw FormatError(what + ": expected " + std::to_string(rows) + " rows");
  }
  Matrix M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& line = j[r];
    if (!line.is_array() || static_cast<Eigen::Index>(line.size()) != cols) {
      throw FormatError(what + ": row " + std::to_string(r) + " needs " +
                        std::to_string(cols) + " values");
    }
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = real(line[c], what);
  }
  return M;
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
  if (!out) throw FormatError("write failed for " + path);
}

/// {name, n, c, labels?, views: [{name, d, present, data}]}, keys in that
/// order, data as d rows of n reals.
inline std::string dataset_to_json(const MultiViewDataset& ds) {
  detail::Writer w;
  w.raw("{\n");
  w.key(2, "name");
  w.text(ds.name);
  w.raw(",\n");
  w.key(2, "n");
  w.raw(std::to_string(ds.n()) + ",\n");
  w.key(2, "c");
  w.raw(std::to_string(ds.c) + ",\n");
  if (ds.labels) {
    w.key(2, "labels");
    w.row(*ds.labels, static_cast<Eigen::Index>(ds.labels->size()),
          [](int l) { return std::to_string(l); });
    w.raw(",\n");
  }
  w.key(2, "views");
  w.raw("[");
  for (std::size_t v = 0; v < ds.views.size(); ++v) {
    const auto& view = ds.views[v];
    w.raw(v ? ",\n    {\n" : "\n    {\n");
    w.key(6, "name");
    w.text(view.x.name);
    w.raw(",\n");
    w.key(6, "d");
    w.raw(std::to_string(view.x.dims()) + ",\n");
    w.key(6, "present");
    w.row(view.mask.g(), view.mask.size(),
          [](double g) { return std::string(g != 0.0 ? "1" : "0"); });
    w.raw(",\n");
    w.key(6, "data");
    w.matrix(view.x.data, 6);
    w.raw("\n    }");
  }
  w.raw(ds.views.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return w.str();
}

inline MultiViewDataset dataset_from_json(const std::string& text) {
  const std::string what = "dataset";
  const auto j = detail::parse(text, what);
  MultiViewDataset ds;
  const auto& name = detail::field(j, "name", what);
  if (!name.is_string()) throw FormatError("dataset: name must be a string");
  ds.name = name.get<std::string>();
  const auto n = detail::integer(detail::field(j, "n", what), "dataset.n");
  ds.c = static_cast<int>(detail::integer(detail::field(j, "c", what), "dataset.c"));
  if (n <= 0) throw FormatError("dataset: n must be positive");
  if (j.contains("labels")) {
    const auto& lj = j.at("labels");
    if (!lj.is_array() || static_cast<long long>(lj.size()) != n) {
      throw FormatError("dataset: labels must hold n integers");
    }
    Labels labels;
    for (const auto& l : lj) {
      labels.push_back(static_cast<int>(detail::integer(l, "dataset.labels")));
    }
    ds.labels = std::move(labels);
  }
  const auto& views = detail::field(j, "views", what);
  if (!views.is_array()) throw FormatError("dataset: views must be an array");
  for (std::size_t v = 0; v < views.size(); ++v) {
    const std::string where = "dataset.views[" + std::to_string(v) + "]";
    const auto& vj = views[v];
    const auto& vname = detail::field(vj, "name", where);
    if (!vname.is_string()) throw FormatError(where + ": name must be a string");
    const auto d = detail::integer(detail::field(vj, "d", where), where + ".d");
    if (d <= 0) throw FormatError(where + ": d must be positive");
    const Vector g = detail::read_vector(detail::field(vj, "present", where),
                                         where + ".present");
    if (g.size() != n) throw FormatError(where + ": present must hold n flags");
    View view;
    view.x = {detail::read_matrix(detail::field(vj, "data", where), d, n,
                                  where + ".data"),
              vname.get<std::string>()};
    view.mask = build_presence(g, d);
    ds.views.push_back(std::move(view));
  }
  return ds;
}

inline MultiViewDataset load_dataset(const std::string& path) {
  auto ds = dataset_from_json(read_file(path));
  validate_dataset(ds);
  return ds;
}

inline void save_dataset(const std::string& path, const MultiViewDataset& ds) {
  validate_dataset(ds);
  write_file(path, dataset_to_json(ds));
}

/// Fitted model plus what is needed to recompute its labels.
struct StateFile {
  std::string algo = "animc";
  LabelMode label_mode = LabelMode::kmeans;
  std::uint64_t seed = 0;
  int iterations = 0;
  ModelState state;  // baselines leave A and w empty
};

inline std::string label_mode_name(LabelMode mode) {
  return mode == LabelMode::argmax ? "argmax" : "kmeans";
}

inline LabelMode parse_label_mode(const std::string& s) {
  if (s == "kmeans") return LabelMode::kmeans;
  if (s == "argmax") return LabelMode::argmax;
  throw FormatError("unknown label mode '" + s + "'");
}

/// {algo, label_mode, seed, iterations, n, c, w, V, bases: [{U, A?}]}.
inline std::string state_to_json(const StateFile& f) {
  const ModelState& s = f.state;
  detail::Writer w;
  w.raw("{\n");
  w.key(2, "algo");
  w.text(f.algo);
  w.raw(",\n");
  w.key(2, "label_mode");
  w.text(label_mode_name(f.label_mode));
  w.raw(",\n");
  w.key(2, "seed");
  w.raw(std::to_string(f.seed) + ",\n");
  w.key(2, "iterations");
  w.raw(std::to_string(f.iterations) + ",\n");
  w.key(2, "n");
  w.raw(std::to_string(s.V.rows()) + ",\n");
  w.key(2, "c");
  w.raw(std::to_string(s.V.cols()) + ",\n");
  w.key(2, "w");
  w.vector(s.w);
  w.raw(",\n");
  w.key(2, "V");
  w.matrix(s.V, 2);
  w.raw(",\n");
  w.key(2, "bases");
  w.raw("[");
  for (std::size_t v = 0; v < s.U.size(); ++v) {
    w.raw(v ? ",\n    {\n" : "\n    {\n");
    w.key(6, "d");
    w.raw(std::to_string(s.U[v].rows()) + ",\n");
    w.key(6, "U");
    w.matrix(s.U[v], 6);
    if (v < s.A.size()) {
      w.raw(",\n");
      w.key(6, "A");
      w.matrix(s.A[v], 6);
    }
    w.raw("\n    }");
  }
  w.raw(s.U.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return w.str();
}

inline StateFile state_from_json(const std::string& text) {
  const std::string what = "state";
  const auto j = detail::parse(text, what);
  StateFile f;
  const auto& algo = detail::field(j, "algo", what);
  const auto& mode = detail::field(j, "label_mode", what);
  if (!algo.is_string() || !mode.is_string()) {
    throw FormatError("state: algo and label_mode must be strings");
  }
  f.algo = algo.get<std::string>();
  f.label_mode = parse_label_mode(mode.get<std::string>());
  const auto& seed = detail::field(j, "seed", what);
  if (!seed.is_number_unsigned()) throw FormatError("state: seed must be unsigned");
  f.seed = seed.get<std::uint64_t>();
  f.iterations = static_cast<int>(
      detail::integer(detail::field(j, "iterations", what), "state.iterations"));
  const auto n = detail::integer(detail::field(j, "n", what), "state.n");
  const auto c = detail::integer(detail::field(j, "c", what), "state.c");
  if (n <= 0 || c <= 0) throw FormatError("state: n and c must be positive");
  f.state.w = detail::read_vector(detail::field(j, "w", what), "state.w");
  f.state.V = detail::read_matrix(detail::field(j, "V", what), n, c, "state.V");
  const auto& bases = detail::field(j, "bases", what);
  if (!bases.is_array()) throw FormatError("state: bases must be an array");
  for (std::size_t v = 0; v < bases.size(); ++v) {
    const std::string where = "state.bases[" + std::to_string(v) + "]";
    const auto d = detail::integer(detail::field(bases[v], "d", where), where + ".d");
    if (d <= 0) throw FormatError(where + ": d must be positive");
    f.state.U.push_back(
        detail::read_matrix(detail::field(bases[v], "U", where), d, c, where + ".U"));
    if (bases[v].contains("A")) {
      f.state.A.push_back(
          detail::read_matrix(bases[v].at("A"), d, c, where + ".A"));
    }
  }
  if (!f.state.A.empty() && f.state.A.size() != f.state.U.size()) {
    throw FormatError("state: A must be given for every basis or none");
  }
  return f;
}

inline StateFile load_state(const std::string& path) {
  return state_from_json(read_file(path));
}

inline void save_state(const std::string& path, const StateFile& f) {
  write_file(path, state_to_json(f));
}

/// iter,objective,r_objective,w_1..w_m with one row per recorded iteration
/// (row 0 is the initial state). A NaN r_objective is written as an empty
/// field; weight columns are omitted when m = 0.
inline std::string trace_to_csv(const std::vector<TraceRecord>& records,
                                std::size_t m) {
  std::ostringstream out;
  out << "iter,objective,r_objective";
  for (std::size_t v = 1; v <= m; ++v) out << ",w_" << v;
  out << '\n';
  for (const auto& rec : records) {
    out << rec.iter << ',' << format_short(rec.objective) << ','
        << (std::isnan(rec.r_objective) ? std::string()
                                        : format_short(rec.r_objective));
    for (std::size_t v = 0; v < m; ++v) {
      out << ',' << (static_cast<Eigen::Index>(v) < rec.w.size()
                         ? format_short(rec.w[static_cast<Eigen::Index>(v)])
                         : std::string());
    }
    out << '\n';
  }
  return out.str();
}

struct ResultRow {
  std::string algo;
  double per = 0.0;
  double noise_rate = 0.0;
  std::string repeat;  // index, or "mean" / "std" for summary rows
  std::uint64_t seed = 0;
  std::optional<MetricBundle> metrics;
  std::optional<double> iters;
  std::optional<double> seconds;
  std::string status = "ok";
};

inline std::string results_header() {
  return "algo,per,noise_rate,repeat,seed,acc,nmi,purity,iters,seconds,status\n";
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + '"';
}

inline std::string result_line(const ResultRow& r) {
  auto opt = [](const std::optional<double>& x) {
    return x ? format_short(*x) : std::string();
  };
  std::ostringstream out;
  out << csv_field(r.algo) << ',' << format_short(r.per) << ','
      << format_short(r.noise_rate) << ',' << r.repeat << ',' << r.seed << ',';
  if (r.metrics) {
    out << format_short(r.metrics->acc) << ',' << format_short(r.metrics->nmi)
        << ',' << format_short(r.metrics->purity);
  } else {
    out << ",,";
  }
  out << ',' << opt(r.iters) << ',' << opt(r.seconds) << ','
      << csv_field(r.status) << '\n';
  return out.str();
}

}  // namespace io
}  // namespace animc
