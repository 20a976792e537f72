// Minimal ambient declarations for yargs, which ships without type
// definitions.  Only the surface used by cli.ts is described; everything is
// typed loosely rather than pulling in the large community type package.
declare module "yargs" {
  export type Argv = any;
  const yargs: (argv: string[]) => Argv;
  export default yargs;
}

declare module "yargs/helpers" {
  export const hideBin: (argv: string[]) => string[];
}
