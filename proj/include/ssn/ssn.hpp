#ifndef SSN_SSN_HPP
#define SSN_SSN_HPP

#include "ssn/cg.hpp"
#include "ssn/error.hpp"
#include "ssn/eval.hpp"
#include "ssn/libsvm_io.hpp"
#include "ssn/model_file.hpp"
#include "ssn/models.hpp"
#include "ssn/solver.hpp"
#include "ssn/sparse.hpp"

#endif  // SSN_SSN_HPP
