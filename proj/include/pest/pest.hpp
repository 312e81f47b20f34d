#pragma once

// Umbrella header for the Pest toolchain: parse, type, interpret, expand
// high-level iteration constructs, strengthen annotations, infer contracts,
// and statically verify via Hoare-style verification conditions.

#include "pest/ast.hpp"
#include "pest/infer.hpp"
#include "pest/interp.hpp"
#include "pest/lexer.hpp"
#include "pest/logic.hpp"
#include "pest/oracle.hpp"
#include "pest/parser.hpp"
#include "pest/pipeline.hpp"
#include "pest/printer.hpp"
#include "pest/smt.hpp"
#include "pest/solver.hpp"
#include "pest/strengthen.hpp"
#include "pest/sugar.hpp"
#include "pest/types.hpp"
#include "pest/vc.hpp"
#include "pest/verify.hpp"
