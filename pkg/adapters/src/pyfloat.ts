/**
 * Format a double exactly the way Python's repr() does, so that interchange
 * files written here survive a load/save cycle in the Python feature store
 * byte for byte.
 *
 * Both V8 and CPython emit the shortest decimal digit string that
 * round-trips the double; they differ only in presentation (exponent
 * thresholds, trailing ".0", zero-padded exponents).  This reformats the
 * digits under Python's rules: positional for decimal exponents in
 * [-4, 16), otherwise scientific with a sign and two-digit exponent.
 */

export function pythonRepr(value: number): string {
  if (!Number.isFinite(value)) {
    throw new Error(`non-finite value not representable in interchange format: ${value}`);
  }
  if (value === 0) {
    return Object.is(value, -0) ? "-0.0" : "0.0";
  }
  const sign = value < 0 ? "-" : "";
  const magnitude = Math.abs(value);

  // toExponential() with no argument yields the shortest round-trip digits
  const [mantissa, expPart] = magnitude.toExponential().split("e");
  const digits = mantissa.replace(".", "");
  const exponent = parseInt(expPart, 10);

  if (exponent >= -4 && exponent < 16) {
    return sign + positional(digits, exponent);
  }
  const fractional = digits.length > 1 ? "." + digits.slice(1) : "";
  const expSign = exponent < 0 ? "-" : "+";
  const expDigits = String(Math.abs(exponent)).padStart(2, "0");
  return `${sign}${digits[0]}${fractional}e${expSign}${expDigits}`;
}

function positional(digits: string, exponent: number): string {
  if (exponent < 0) {
    return "0." + "0".repeat(-exponent - 1) + digits;
  }
  if (digits.length <= exponent + 1) {
    return digits + "0".repeat(exponent + 1 - digits.length) + ".0";
  }
  return digits.slice(0, exponent + 1) + "." + digits.slice(exponent + 1);
}
