#ifndef PKIFLOW_MODEL_IO_HPP
#define PKIFLOW_MODEL_IO_HPP

#include <string>

#include "pkiflow/pki.hpp"

namespace pkiflow {

// Versioned JSON model dumps. Every document carries {"format_version": 1,
// "type": "<tag>"}; parsing a document of the wrong type or an unknown
// version throws InvalidSpec. Doubles round-trip exactly.

std::string cluster_model_to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(const std::string& text);

std::string supervised_model_to_json(const SupervisedModel& model);
SupervisedModel supervised_model_from_json(const std::string& text);

std::string pki_model_to_json(const PkiModel& model);
PkiModel pki_model_from_json(const std::string& text);

} // namespace pkiflow

#endif
