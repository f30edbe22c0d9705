#pragma once

// Umbrella header: the whole toolchain, front to back.

#include "dia/text.hpp"
#include "dia/diagnostics.hpp"
#include "dia/model.hpp"
#include "dia/profile.hpp"
#include "dia/validate.hpp"
#include "dia/lexer.hpp"
#include "dia/parser.hpp"
#include "dia/format.hpp"
#include "dia/check.hpp"
#include "dia/transform.hpp"
#include "dia/tosca.hpp"
#include "dia/qn.hpp"
#include "dia/simulate.hpp"
#include "dia/feedback.hpp"
#include "dia/report.hpp"
