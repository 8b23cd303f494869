#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace radbif {

enum class CertificateKind { Positivity, Nondegeneracy, TestFunction, NonSingularity, MuMonotonicity };

std::string_view to_string(CertificateKind kind);

/// Outcome of one numerical check. `pass` is decided from `margins` and fixed thresholds.
struct CertificateReport {
  CertificateKind kind = CertificateKind::Positivity;
  bool pass = false;
  std::vector<std::pair<std::string, double>> margins;
  std::string details;

  std::optional<double> margin(std::string_view name) const {
    for (const auto& [key, value] : margins) {
      if (key == name) return value;
    }
    return std::nullopt;
  }
};

}  // namespace radbif
