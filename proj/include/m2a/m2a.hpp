#pragma once

// Umbrella header: the full translation pipeline and the bounded
// equational oracle.

#include "m2a/ast.hpp"
#include "m2a/builtins.hpp"
#include "m2a/diagnostics.hpp"
#include "m2a/emit.hpp"
#include "m2a/mangle.hpp"
#include "m2a/oracle.hpp"
#include "m2a/parser.hpp"
#include "m2a/poset.hpp"
#include "m2a/pretty.hpp"
#include "m2a/signature.hpp"
#include "m2a/theory.hpp"
#include "m2a/token.hpp"
#include "m2a/translate.hpp"
#include "m2a/version.hpp"
