#include "sdc/report.hpp"

namespace sdc::io {

Json matrix_to_json(const Matrix<double>& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vector<double>& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const Tolerances<double>& tol) {
  return Json{{"sym", tol.sym}, {"eig_cluster", tol.eig_cluster}, {"rank", tol.rank}, {"residual", tol.residual}};
}

Json to_json(const Certificate<double>& cert) {
  Json out{{"kind", to_string(cert.kind)}};
  switch (cert.kind) {
    case CertificateKind::NotDiagonalizable:
      out["anchor"] = cert.anchor;
      out["matrix"] = cert.first;
      out["in_block"] = cert.in_block;
      if (cert.in_block) out["splitter"] = cert.stage;
      out["verdict"] = to_string(cert.verdict);
      out["gray_zone"] = cert.verdict == Diagonalizability::GrayZone;
      break;
    case CertificateKind::SymmetryViolation:
      out["anchor"] = cert.anchor;
      out["pair"] = Json::array({cert.first, cert.second});
      break;
    case CertificateKind::CouplingNonzero:
    case CertificateKind::NorthwestNotSDC:
      out["stage"] = cert.stage;
      break;
    case CertificateKind::NoNonsingularAnchor:
      break;
  }
  out["residual"] = cert.residual;
  out["threshold"] = cert.threshold;
  out["inner"] = cert.inner ? to_json(*cert.inner) : Json(nullptr);
  return out;
}

Json to_json(const VerificationReport<double>& report) {
  return Json{{"passed", report.passed},
              {"per_matrix_offdiag", vector_to_json(report.per_matrix_offdiag)},
              {"p_min_singular", report.p_min_singular},
              {"p_max_singular", report.p_max_singular}};
}

namespace {

Json solver_json(const Diagnosis<double>& d) {
  Json out{{"path", to_string(d.path)}, {"anchor", d.anchor ? Json(*d.anchor) : Json(nullptr)}};
  if (d.trace) {
    Json stages = Json::array();
    for (const auto& s : d.trace->stages) {
      stages.push_back(Json{{"matrix", s.matrix},
                            {"p", s.p},
                            {"s", s.s},
                            {"r", s.r},
                            {"coupling_norm", s.coupling_norm},
                            {"mu", s.mu ? Json(*s.mu) : Json(nullptr)}});
    }
    out["stages"] = std::move(stages);
  }
  return out;
}

}  // namespace

Json run_report(const Diagnosis<double>& diagnosis, const Tolerances<double>& tol, const Timings& timings) {
  const auto& result = diagnosis.result;
  Json out;
  out["status"] = result.is_sdc() ? "SDC" : "NOT_SDC";
  if (result.is_sdc()) {
    const auto& sol = result.solution();
    out["P"] = matrix_to_json(sol.P);
    Json diagonals = Json::array();
    for (const auto& d : sol.diagonals) diagonals.push_back(vector_to_json(d));
    out["diagonals"] = std::move(diagonals);
    out["residuals"] = vector_to_json(sol.residuals);
    out["certificate"] = nullptr;
  } else {
    out["P"] = nullptr;
    out["diagonals"] = nullptr;
    out["residuals"] = nullptr;
    out["certificate"] = to_json(result.certificate());
  }
  out["timings"] = Json(timings);
  out["tolerances"] = to_json(tol);
  out["solver"] = solver_json(diagnosis);
  return out;
}

Json check_report(const Diagnosis<double>& diagnosis) {
  const auto& result = diagnosis.result;
  return Json{{"status", result.is_sdc() ? "SDC" : "NOT_SDC"},
              {"certificate", result.is_sdc() ? Json(nullptr) : to_json(result.certificate())}};
}

}  // namespace sdc::io
