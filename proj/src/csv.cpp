#include "posctrl/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace posctrl {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

// Column names are 1-based: x1..xn, u1..um.
void header_block(std::ostringstream& out, const std::string& prefix, Eigen::Index count) {
  for (Eigen::Index i = 0; i < count; ++i) out << ',' << prefix << (i + 1);
}

void value_block(std::ostringstream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << format_double(v(i));
}

void matrix_header(std::ostringstream& out, const std::string& prefix, Eigen::Index rows,
                   Eigen::Index cols) {
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out << ',' << prefix << (i + 1) << '_' << (j + 1);
}

void matrix_block(std::ostringstream& out, const Matrix& M) {
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) out << ',' << format_double(M(i, j));
}

}  // namespace

std::string value_csv(const ValueSequence& vs) {
  std::ostringstream out;
  const Eigen::Index n = vs.p.empty() ? 0 : vs.p[0].size();
  out << 't';
  header_block(out, "p", n);
  out << '\n';
  for (int t = 0; t <= vs.horizon; ++t) {
    out << t;
    value_block(out, vs.p[t]);
    out << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const SimResult& sim) {
  std::ostringstream out;
  out << 't';
  header_block(out, "x", sim.x.cols());
  header_block(out, "u", sim.u.cols());
  header_block(out, "a", sim.a.cols());
  header_block(out, "y", sim.y.cols());
  out << ",stage_cost,cum_cost\n";
  for (int t = 0; t < sim.steps; ++t) {
    out << t;
    value_block(out, sim.x.row(t).transpose());
    value_block(out, sim.u.row(t).transpose());
    value_block(out, sim.a.row(t).transpose());
    value_block(out, sim.y.row(t).transpose());
    out << ',' << format_double(sim.stage_cost(t)) << ',' << format_double(sim.cum_cost(t))
        << '\n';
  }
  return out.str();
}

std::string margin_csv(const MarginReport& rep) {
  std::ostringstream out;
  out << 't';
  header_block(out, "ch", rep.per_channel.rows());
  out << ",m\n";
  for (Eigen::Index t = 0; t < rep.per_channel.cols(); ++t) {
    out << t;
    value_block(out, rep.per_channel.col(t));
    out << ',' << format_double(rep.m(t)) << '\n';
  }
  return out.str();
}

std::string policy_csv(const PolicySchedule& ps) {
  std::ostringstream out;
  out << 't';
  if (!ps.K.empty()) matrix_header(out, "K", ps.K[0].rows(), ps.K[0].cols());
  if (!ps.L.empty()) matrix_header(out, "L", ps.L[0].rows(), ps.L[0].cols());
  out << '\n';
  for (std::size_t t = 0; t < ps.K.size(); ++t) {
    out << t;
    matrix_block(out, ps.K[t]);
    if (t < ps.L.size()) matrix_block(out, ps.L[t]);
    out << '\n';
  }
  return out.str();
}

std::string sweep_csv(const std::vector<Vector>& alphas, const std::vector<MarginReport>& reports) {
  if (alphas.size() != reports.size())
    throw std::invalid_argument("sweep_csv needs one report per alpha");
  std::ostringstream out;
  const Eigen::Index l = alphas.empty() ? 0 : alphas[0].size();
  out << "idx";
  header_block(out, "alpha", l);
  out << ",finite,t_star,full_horizon_margin\n";
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    out << k;
    value_block(out, alphas[k]);
    out << ',' << (reports[k].finite_value ? 1 : 0) << ',';
    if (reports[k].t_star) out << *reports[k].t_star;
    out << ',' << format_double(reports[k].m(0)) << '\n';
  }
  return out.str();
}

std::string plot_data(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("plot_data series differ in length");
  std::ostringstream out;
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << format_double(xs[i]) << ' ' << format_double(ys[i]) << '\n';
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("short write to '" + path + "'");
}

}  // namespace posctrl
