/**
 * Headline preprocessing before tokenization: lowercase and strip symbols that
 * carry no sentiment. The strip set is a declared choice: word characters,
 * whitespace, and basic sentence punctuation survive; everything else becomes a
 * space. Sub-word truncation to the model's 512-token limit happens in the
 * tokenizer, not here.
 */

export const STRIP_PATTERN = /[^\w\s.,!?'%$-]/g;

export function cleanHeadline(text: string): string {
  return text.toLowerCase().replace(STRIP_PATTERN, " ").replace(/\s+/g, " ").trim();
}
