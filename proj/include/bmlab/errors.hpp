#pragma once

#include <stdexcept>
#include <string>

namespace bmlab {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define BMLAB_DEFINE_ERROR(Name)                                              \
    struct Name : Error {                                                     \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}  \
    }

BMLAB_DEFINE_ERROR(NotCentered);
BMLAB_DEFINE_ERROR(AllBelowTolerance);
BMLAB_DEFINE_ERROR(ShiftExceedsTruncation);
BMLAB_DEFINE_ERROR(NonIntegrable);
BMLAB_DEFINE_ERROR(NotEmbeddable);
BMLAB_DEFINE_ERROR(LagTooLarge);
BMLAB_DEFINE_ERROR(NonSummable);
BMLAB_DEFINE_ERROR(CapExceeded);
BMLAB_DEFINE_ERROR(LengthMismatch);
BMLAB_DEFINE_ERROR(EmptyRange);
BMLAB_DEFINE_ERROR(NonPositiveValue);
BMLAB_DEFINE_ERROR(OutOfRegime);
BMLAB_DEFINE_ERROR(RankMismatch);
BMLAB_DEFINE_ERROR(LatticeTooLarge);
BMLAB_DEFINE_ERROR(ConditionViolated);
BMLAB_DEFINE_ERROR(InconsistentRefinement);
BMLAB_DEFINE_ERROR(NonPositiveVariation);
BMLAB_DEFINE_ERROR(RegimeViolation);
BMLAB_DEFINE_ERROR(ConfigInvalid);

#undef BMLAB_DEFINE_ERROR

}  // namespace bmlab
