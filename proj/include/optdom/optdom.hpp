#pragma once

#include "optdom/error.hpp"
#include "optdom/numeric.hpp"
#include "optdom/finite_vector.hpp"
#include "optdom/space.hpp"
#include "optdom/seqspace.hpp"
#include "optdom/expression.hpp"
#include "optdom/matrix.hpp"
#include "optdom/estimate.hpp"
#include "optdom/growth.hpp"
#include "optdom/parallel.hpp"
#include "optdom/matop.hpp"
#include "optdom/vmeasure.hpp"
#include "optdom/ascent.hpp"
#include "optdom/factor.hpp"
#include "optdom/oracle.hpp"
#include "optdom/io.hpp"
#include "optdom/report.hpp"
#include "optdom/analysis.hpp"
#include "optdom/verify.hpp"
