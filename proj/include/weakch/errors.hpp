#pragma once

#include <stdexcept>
#include <string>

namespace weakch {

// Base for every domain error raised by the library. The CLI maps these to
// exit code 2 (precondition / validation failure).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define WEAKCH_DEFINE_ERROR(Name)               \
    class Name : public Error {                 \
    public:                                     \
        using Error::Error;                     \
    };

// prob_core
WEAKCH_DEFINE_ERROR(EmptySpace)
WEAKCH_DEFINE_ERROR(NegativeWeight)
WEAKCH_DEFINE_ERROR(ForeignEvent)
WEAKCH_DEFINE_ERROR(ZeroConditioner)
WEAKCH_DEFINE_ERROR(InvalidPartition)

// inequalities
WEAKCH_DEFINE_ERROR(BadEpsilon)
WEAKCH_DEFINE_ERROR(BadSettingProbs)
WEAKCH_DEFINE_ERROR(MixedEpsilon)
WEAKCH_DEFINE_ERROR(UnnormalizedTable)

// common_cause
WEAKCH_DEFINE_ERROR(PreconditionViolated)
WEAKCH_DEFINE_ERROR(GenerationFailed)
WEAKCH_DEFINE_ERROR(UnnormalizedInput)

// eprb_sim
WEAKCH_DEFINE_ERROR(BadModelFile)
WEAKCH_DEFINE_ERROR(UndefinedEstimate)

#undef WEAKCH_DEFINE_ERROR

}  // namespace weakch
