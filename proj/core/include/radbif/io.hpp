#pragma once

#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "radbif/certificate.hpp"
#include "radbif/curve.hpp"
#include "radbif/format.hpp"
#include "radbif/ivp.hpp"
#include "radbif/transform.hpp"

namespace radbif {

// CSV writers. Numbers use the shortest round-trip form, so output is byte-stable.
void write_profile_csv(std::ostream& out, const RadialProfile& profile);           // r,u,du
void write_curve_csv(std::ostream& out, const BifurcationCurve& curve);            // alpha,lambda,outcome
void write_mu_csv(std::ostream& out, const std::vector<MuPoint>& points);          // w0,mu,source
void write_scan_csv(std::ostream& out, const ScanTable& table);                    // epsilon,shape,n_turns

nlohmann::json to_json(const RadialProfile& profile);
nlohmann::json to_json(const CertificateReport& report);
nlohmann::json to_json(const TurningPoint& tp);
nlohmann::json to_json(const CurveShape& shape);
nlohmann::json to_json(const BifurcationCurve& curve);
nlohmann::json to_json(const MuPoint& point);
nlohmann::json to_json(const ScanTable& table);

}  // namespace radbif
