/**
 * Decimal rendering at 17 significant digits, byte-compatible with the
 * backend's C-style `%.17g`: fixed notation for decimal exponents in
 * [-4, 17), scientific otherwise, trailing zeros stripped, exponents signed
 * with at least two digits. Lossless for 64-bit floats.
 */
export function formatG17(value: number): string {
    if (!Number.isFinite(value)) {
        throw new Error(`cannot format non-finite value ${value}`);
    }
    if (value === 0) {
        return Object.is(value, -0) ? "-0" : "0";
    }
    const text = value.toExponential(16); // 17 significant digits, correctly rounded
    const match = /^(-?)(\d)\.(\d{16})e([+-]\d+)$/.exec(text);
    if (!match) {
        throw new Error(`unexpected exponential form ${text}`);
    }
    const [, sign, lead, rest, expText] = match;
    const digits = lead + rest;
    const exponent = parseInt(expText, 10);
    if (exponent >= -4 && exponent < 17) {
        let body: string;
        if (exponent >= 0) {
            const intPart = digits.slice(0, exponent + 1);
            const fracPart = stripTrailingZeros(digits.slice(exponent + 1));
            body = fracPart ? `${intPart}.${fracPart}` : intPart;
        } else {
            const fracPart = stripTrailingZeros("0".repeat(-exponent - 1) + digits);
            body = `0.${fracPart}`;
        }
        return sign + body;
    }
    const mantissaFrac = stripTrailingZeros(rest);
    const mantissa = mantissaFrac ? `${lead}.${mantissaFrac}` : lead;
    const expSign = exponent < 0 ? "-" : "+";
    const expDigits = String(Math.abs(exponent)).padStart(2, "0");
    return `${sign}${mantissa}e${expSign}${expDigits}`;
}

function stripTrailingZeros(digits: string): string {
    return digits.replace(/0+$/, "");
}
