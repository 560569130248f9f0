#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "chansim/distribution.hpp"
#include "chansim/errors.hpp"

namespace chansim {

// Discrete memoryless channel W(y|x): a row-stochastic matrix, rows indexed
// by inputs. Rows are validated and normalized at construction; immutable.
class Channel {
 public:
  Channel(int input_size, int output_size, std::vector<double> entries)
      : nx_(input_size), ny_(output_size), w_(std::move(entries)) {
    if (nx_ <= 0 || ny_ <= 0 ||
        w_.size() != static_cast<std::size_t>(nx_) * ny_)
      throw Error("Channel: shape mismatch");
    for (int x = 0; x < nx_; ++x) {
      double sum = 0.0;
      for (int y = 0; y < ny_; ++y) {
        double& v = w_[x * ny_ + y];
        if (v < 0.0) {
          if (v > -1e-15)
            v = 0.0;
          else
            throw Error("Channel: negative entry");
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw Error("Channel: row " + std::to_string(x) +
                    " is not stochastic");
      for (int y = 0; y < ny_; ++y) w_[x * ny_ + y] /= sum;
    }
  }

  static Channel bsc(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("bsc: p must be in [0,1]");
    return Channel(2, 2, {1.0 - p, p, p, 1.0 - p});
  }

  static Channel identity(int n) {
    std::vector<double> e(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) e[i * n + i] = 1.0;
    return Channel(n, n, std::move(e));
  }

  // All rows equal: the output ignores the input (zero capacity).
  static Channel constant_rows(int input_size, const Distribution& row) {
    std::vector<double> e;
    e.reserve(static_cast<std::size_t>(input_size) * row.size());
    for (int x = 0; x < input_size; ++x)
      e.insert(e.end(), row.probs().begin(), row.probs().end());
    return Channel(input_size, row.size(), std::move(e));
  }

  // Z-channel: input 0 passes clean, input 1 flips to 0 with probability p.
  static Channel z_channel(double p) {
    return Channel(2, 2, {1.0, 0.0, p, 1.0 - p});
  }

  int input_size() const { return nx_; }
  int output_size() const { return ny_; }
  double operator()(int y, int x) const { return w_[x * ny_ + y]; }
  std::span<const double> row(int x) const {
    return std::span<const double>(w_).subspan(
        static_cast<std::size_t>(x) * ny_, ny_);
  }
  Distribution row_distribution(int x) const {
    return Distribution(std::vector<double>(row(x).begin(), row(x).end()));
  }

  // Output distribution W(P).
  Distribution push_forward(const Distribution& input) const {
    if (input.size() != nx_) throw AlphabetMismatchError("push_forward");
    std::vector<double> out(ny_, 0.0);
    for (int x = 0; x < nx_; ++x)
      for (int y = 0; y < ny_; ++y) out[y] += input[x] * (*this)(y, x);
    return Distribution(std::move(out));
  }

  JointDistribution joint_with_input(const Distribution& input) const {
    if (input.size() != nx_) throw AlphabetMismatchError("joint_with_input");
    std::vector<double> j(static_cast<std::size_t>(nx_) * ny_);
    for (int x = 0; x < nx_; ++x)
      for (int y = 0; y < ny_; ++y) j[x * ny_ + y] = input[x] * (*this)(y, x);
    return JointDistribution(nx_, ny_, std::move(j));
  }

  // Product channel W x W' on (X x X') -> (Y x Y').
  static Channel product(const Channel& a, const Channel& b) {
    const int nx = a.nx_ * b.nx_, ny = a.ny_ * b.ny_;
    std::vector<double> e(static_cast<std::size_t>(nx) * ny);
    for (int xa = 0; xa < a.nx_; ++xa)
      for (int xb = 0; xb < b.nx_; ++xb)
        for (int ya = 0; ya < a.ny_; ++ya)
          for (int yb = 0; yb < b.ny_; ++yb)
            e[(xa * b.nx_ + xb) * ny + (ya * b.ny_ + yb)] =
                a(ya, xa) * b(yb, xb);
    return Channel(nx, ny, std::move(e));
  }

  // Presets: "bsc:0.1", "z:0.2", "identity:2", "uniform:2x3".
  static Channel parse(const std::string& spec) {
    auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const std::string arg =
        colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (name == "bsc") return bsc(std::stod(arg));
    if (name == "z") return z_channel(std::stod(arg));
    if (name == "identity") return identity(std::stoi(arg));
    if (name == "uniform") {
      auto xpos = arg.find('x');
      int nin = std::stoi(arg.substr(0, xpos));
      int nout = std::stoi(arg.substr(xpos + 1));
      return constant_rows(nin, Distribution::uniform(nout));
    }
    throw Error("Channel::parse: unknown preset '" + spec + "'");
  }

  // Whitespace-separated matrix, one line per input row.
  static Channel from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("Channel::from_file: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::vector<double> r;
      double v;
      while (ls >> v) r.push_back(v);
      if (!r.empty()) rows.push_back(std::move(r));
    }
    if (rows.empty()) throw Error("Channel::from_file: no rows in " + path);
    const std::size_t ny = rows.front().size();
    std::vector<double> flat;
    for (const auto& r : rows) {
      if (r.size() != ny)
        throw Error("Channel::from_file: ragged rows in " + path);
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return Channel(static_cast<int>(rows.size()), static_cast<int>(ny),
                   std::move(flat));
  }

 private:
  int nx_, ny_;
  std::vector<double> w_;  // row-major by input
};

}  // namespace chansim
