#pragma once

#include <stdexcept>
#include <string>

namespace rh {

enum class ErrorCode {
	NonIntegerWinding,
	DegenerateEmbedding,
	MapIterationDiverged,
	SingularityTooClose,
	NearBoundaryUnresolved,
	WindingMismatch,
	SingularFredholm,
	PinningSingular,
	WrongNullspaceDimension,
	RatioUndefined,
	KernelBoundViolated,
	EllipticityViolated,
	IterationDiverged,
	IndexOutOfRange,
	MultivaluedPotential,
	ParseError,
	ValidationError,
	SolverError,
	MissingReport,
};

inline const char* error_name(ErrorCode c) {
	switch (c) {
	case ErrorCode::NonIntegerWinding: return "NonIntegerWinding";
	case ErrorCode::DegenerateEmbedding: return "DegenerateEmbedding";
	case ErrorCode::MapIterationDiverged: return "MapIterationDiverged";
	case ErrorCode::SingularityTooClose: return "SingularityTooClose";
	case ErrorCode::NearBoundaryUnresolved: return "NearBoundaryUnresolved";
	case ErrorCode::WindingMismatch: return "WindingMismatch";
	case ErrorCode::SingularFredholm: return "SingularFredholm";
	case ErrorCode::PinningSingular: return "PinningSingular";
	case ErrorCode::WrongNullspaceDimension: return "WrongNullspaceDimension";
	case ErrorCode::RatioUndefined: return "RatioUndefined";
	case ErrorCode::KernelBoundViolated: return "KernelBoundViolated";
	case ErrorCode::EllipticityViolated: return "EllipticityViolated";
	case ErrorCode::IterationDiverged: return "IterationDiverged";
	case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
	case ErrorCode::MultivaluedPotential: return "MultivaluedPotential";
	case ErrorCode::ParseError: return "ParseError";
	case ErrorCode::ValidationError: return "ValidationError";
	case ErrorCode::SolverError: return "SolverError";
	case ErrorCode::MissingReport: return "MissingReport";
	}
	return "Unknown";
}

class Error : public std::runtime_error {
public:
	Error(ErrorCode code, const std::string& what)
		: std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
	ErrorCode code() const { return code_; }

private:
	ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
	throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
	if (!ok) fail(code, what);
}

} // namespace rh
