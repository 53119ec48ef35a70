#pragma once

#include <stdexcept>
#include <string>

namespace opl {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define OPL_DEFINE_ERROR(Name)                                  \
  struct Name : Error {                                         \
    explicit Name(const std::string& what) : Error(what) {}     \
  }

OPL_DEFINE_ERROR(DimensionMismatch);
OPL_DEFINE_ERROR(NonFiniteValue);
OPL_DEFINE_ERROR(ActionOutOfRange);
OPL_DEFINE_ERROR(InvalidPropensityRow);
OPL_DEFINE_ERROR(KOutOfRange);
OPL_DEFINE_ERROR(MissingArmInTrainingFolds);
OPL_DEFINE_ERROR(EtaOutOfRange);
OPL_DEFINE_ERROR(ZeroPropensity);
OPL_DEFINE_ERROR(EmptyPointSet);
OPL_DEFINE_ERROR(TooFewRows);
OPL_DEFINE_ERROR(DegenerateDataset);
OPL_DEFINE_ERROR(MissingVariable);
OPL_DEFINE_ERROR(InstanceTooLarge);
OPL_DEFINE_ERROR(ParameterOutOfRange);
OPL_DEFINE_ERROR(IoError);
OPL_DEFINE_ERROR(ParseError);

#undef OPL_DEFINE_ERROR

}  // namespace opl
