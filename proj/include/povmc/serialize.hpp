#pragma once

// JSON documents, schema "povmc/1". Every document is an object
//   {"schema": "povmc/1", "type": <type tag>, ...payload}
// Complex scalars are [re, im]; matrices are nested row-major arrays of
// complex scalars; vectors are flat arrays of complex scalars. Doubles are
// written with 17 significant digits, so values round-trip exactly.
//
// Decoding errors carry the JSON pointer of the offending node.

#include <string>
#include <vector>

#include <json.hpp>

#include "povmc/compat.hpp"
#include "povmc/errors.hpp"
#include "povmc/compress.hpp"
#include "povmc/cvlab.hpp"
#include "povmc/quantum.hpp"
#include "povmc/sdp.hpp"

namespace povmc::io {

using json = nlohmann::json;

inline constexpr const char* kSchema = "povmc/1";
inline constexpr const char* kSdpSchema = "povmc-sdp/1";

/// Malformed or schema-violating input; what() starts with the quoted pointer.
class SchemaError : public ValidationError {
 public:
  SchemaError(const std::string& pointer, const std::string& what)
      : ValidationError("\"" + pointer + "\": " + what), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// Parses text; syntax errors become SchemaError at "" with the byte offset.
json parse(const std::string& text);
json read_file(const std::string& path);
/// Pretty-printed, key order fixed, trailing newline.
std::string dump(const json& doc);

// --- primitives ---------------------------------------------------------

json encode(cplx z);
json encode(const Matrix& m);
json encode(const Vector& v);
json encode(const std::vector<Matrix>& ms);
json encode(const std::vector<EffectList>& ms);

cplx decode_complex(const json& j, const std::string& ptr);
Matrix decode_matrix(const json& j, const std::string& ptr);
Vector decode_vector(const json& j, const std::string& ptr);
std::vector<Matrix> decode_matrix_list(const json& j, const std::string& ptr);
std::vector<EffectList> decode_family(const json& j, const std::string& ptr);

// --- documents ----------------------------------------------------------

/// Type tag of a document after checking the schema field.
std::string document_type(const json& doc);

json to_document(const DensityState& s);
json to_document(const MeasurementSet& ms);
json to_document(const Assemblage& a);
json to_document(const KrausChannel& c);
json to_document(const ChoiMatrix& j);
json to_document(const Instrument& i);
json to_document(const PointwiseKrausModel& m);
json to_document(const PureDecomposition& d);
json to_document(const ParentModel& p);
json to_document(const Witness& w);
json to_document(const LhsModel& m);
json to_document(const SeparablePreparation& p);
json to_document(const PreparationModel& m);
json to_document(const ResponseParent& p);
json to_document(const WeightedKraus& w);
json to_document(const std::vector<ScanRow>& rows);

DensityState read_state(const json& doc);
MeasurementSet read_measurement_set(const json& doc);
Assemblage read_assemblage(const json& doc);
KrausChannel read_kraus_channel(const json& doc);
ChoiMatrix read_choi(const json& doc);
Instrument read_instrument(const json& doc);
PointwiseKrausModel read_pointwise_model(const json& doc);
PureDecomposition read_pure_decomposition(const json& doc);
ParentModel read_parent_model(const json& doc);
Witness read_witness(const json& doc);
LhsModel read_lhs_model(const json& doc);
SeparablePreparation read_separable_preparation(const json& doc);
PreparationModel read_preparation_model(const json& doc);
ResponseParent read_response_parent(const json& doc);
WeightedKraus read_weighted_kraus(const json& doc);
std::vector<ScanRow> read_scan(const json& doc);
/// "cv_scan_config": optional dims, bins, bin_edges, sigma
/// ("maximally_mixed" | "thermal"), beta, seesaw_ns, seesaw_restarts,
/// seesaw_max_rounds, resolution. Infinite bin edges are written "-inf" and
/// "inf". Solver options are not part of it.
ScanOptions read_scan_config(const json& doc);
json to_document(const ScanOptions& o);

/// Optional "sigma" field of a document, as a state.
std::optional<DensityState> read_sigma_field(const json& doc);

/// Fields of robustness and certificate reports, used inside CLI output.
json encode(const RobustnessResult& r);
json encode(const CertificateReport& c);

/// Debug dump of a problem and optionally a solution ("povmc-sdp/1").
json sdp_dump(const SdpProblem& p, const SdpSolution* s = nullptr);

}  // namespace povmc::io
