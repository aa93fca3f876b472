#include "cmcnn/errors.hpp"

namespace cmcnn {

std::string errorKind(const std::exception& e) {
  if (dynamic_cast<const ShapeError*>(&e)) return "shape";
  if (dynamic_cast<const GenomeArityError*>(&e)) return "genome-arity";
  if (dynamic_cast<const LabelError*>(&e)) return "label";
  if (dynamic_cast<const CorruptionError*>(&e)) return "corruption";
  if (dynamic_cast<const DataError*>(&e)) return "data";
  if (dynamic_cast<const FormatError*>(&e)) return "format";
  if (dynamic_cast<const MetricInputError*>(&e)) return "metric-input";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const IndexError*>(&e)) return "index";
  if (dynamic_cast<const CrossoverError*>(&e)) return "crossover";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const PartitionError*>(&e)) return "partition";
  if (dynamic_cast<const ReportingError*>(&e)) return "reporting";
  if (dynamic_cast<const SearchSpaceError*>(&e)) return "search-space";
  if (dynamic_cast<const NumericError*>(&e)) return "numeric";
  if (dynamic_cast<const Error*>(&e)) return "error";
  return "internal";
}

}  // namespace cmcnn
