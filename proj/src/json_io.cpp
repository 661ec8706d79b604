#include "opmod/json_io.hpp"

#include <fstream>

namespace opmod::io {

json matrix_to_json(const ComplexMatrix& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  if (m.is_square()) j["dim"] = m.rows();
  std::vector<double> re(m.size()), im(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    re[i] = m.data()[i].real();
    im[i] = m.data()[i].imag();
  }
  j["re"] = re;
  j["im"] = im;
  return j;
}

ComplexMatrix matrix_from_json(const json& j) {
  std::size_t rows, cols;
  if (j.contains("rows") && j.contains("cols")) {
    rows = j.at("rows").get<std::size_t>();
    cols = j.at("cols").get<std::size_t>();
  } else if (j.contains("dim")) {
    rows = cols = j.at("dim").get<std::size_t>();
  } else {
    throw std::invalid_argument("matrix json: need rows/cols or dim");
  }
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != rows * cols || im.size() != rows * cols)
    throw std::invalid_argument("matrix json: re/im length does not match rows*cols");
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = cplx(re[i], im[i]);
  if (!m.all_finite()) throw std::invalid_argument("matrix json: non-finite entries");
  return m;
}

json normal_to_json(const NormalOperator& n) {
  json j;
  std::vector<double> re(n.dim()), im(n.dim());
  for (std::size_t i = 0; i < n.dim(); ++i) {
    re[i] = n.eigenvalues()[i].real();
    im[i] = n.eigenvalues()[i].imag();
  }
  j["eig_re"] = re;
  j["eig_im"] = im;
  j["conjugator"] = matrix_to_json(n.conjugator());
  return j;
}

NormalOperator normal_from_json(const json& j) {
  const auto re = j.at("eig_re").get<std::vector<double>>();
  const auto im = j.at("eig_im").get<std::vector<double>>();
  if (re.size() != im.size()) throw std::invalid_argument("normal json: eig arrays mismatch");
  std::vector<cplx> eigs(re.size());
  for (std::size_t i = 0; i < eigs.size(); ++i) eigs[i] = cplx(re[i], im[i]);
  return NormalOperator(std::move(eigs), matrix_from_json(j.at("conjugator")));
}

json witness_to_json(const moduli::ModulusWitness& w) {
  json j;
  j["schema"] = "opmod-witness/1";
  j["kind"] = moduli::kind_name(w.kind);
  j["f"] = w.f_id;
  j["delta"] = w.delta;
  j["value"] = w.value;
  j["seed"] = w.seed;
  j["n1"] = normal_to_json(w.n1);
  j["n2"] = normal_to_json(w.n2);
  if (!w.partner.empty()) j["partner"] = matrix_to_json(w.partner);
  return j;
}

moduli::ModulusWitness witness_from_json(const json& j) {
  if (j.value("schema", "") != "opmod-witness/1")
    throw std::invalid_argument("witness json: unknown schema");
  moduli::ModulusWitness w{moduli::kind_from_name(j.at("kind").get<std::string>()),
                           j.at("f").get<std::string>(),
                           j.at("delta").get<double>(),
                           j.at("value").get<double>(),
                           normal_from_json(j.at("n1")),
                           normal_from_json(j.at("n2")),
                           j.contains("partner") ? matrix_from_json(j.at("partner"))
                                                 : ComplexMatrix{},
                           j.value("seed", std::uint64_t{0})};
  moduli::validate_witness(w);
  return w;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace opmod::io
