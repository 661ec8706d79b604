#ifndef OPMOD_JSON_IO_HPP
#define OPMOD_JSON_IO_HPP

//
// Module      : json_io
// Description : the matrix interchange format (dim/rows/cols + flat re[]/im[]
//               arrays, row-major) and witness (de)serialization
//

#include <string>

#include <json.hpp>

#include "opmod/complex_matrix.hpp"
#include "opmod/linalg.hpp"
#include "opmod/moduli.hpp"

namespace opmod::io {

using json = nlohmann::json;

json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

json normal_to_json(const NormalOperator& n);
NormalOperator normal_from_json(const json& j);

json witness_to_json(const moduli::ModulusWitness& w);
// re-validates on load (class membership, constraint, value) and throws
// validation_error on any mismatch
moduli::ModulusWitness witness_from_json(const json& j);

void save_json(const json& j, const std::string& path);
json load_json(const std::string& path);

}  // namespace opmod::io

#endif
